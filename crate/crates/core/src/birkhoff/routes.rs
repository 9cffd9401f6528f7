use crate::error::{Error, Result};
use crate::piecewise::{AffinePiece, PiecewiseFn, C64};
use crate::system::IntervalSystem;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

/// Largest piece count a composed observable may reach on the orbit route.
pub const ORBIT_PIECE_CAP: usize = 1 << 16;

/// A way of producing the correlation sequence `c_i = ∫φ·Lⁱγ dm`.
pub trait CorrelationRoute: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, sys: &IntervalSystem) -> bool;

    /// Work that depends on `φ` only.
    fn prepare<'a>(&self, sys: &'a IntervalSystem, phi: &PiecewiseFn) -> Result<Box<dyn PreparedRoute + 'a>>;
}

pub trait PreparedRoute: Send + Sync {
    fn route_name(&self) -> &'static str;

    fn stream<'s>(&'s self, gamma: &PiecewiseFn) -> Result<Box<dyn CorrelationStream + 's>>;
}

pub trait CorrelationStream {
    /// The next `c_i`, starting at `i = 0`.
    fn next_term(&mut self) -> Result<C64>;
}

fn affine_or_unsupported(sys: &IntervalSystem, route: &str) -> Result<Vec<AffinePiece>> {
    sys.map()
        .affine_pieces()
        .ok_or_else(|| Error::unsupported(format!("route `{route}` needs a piecewise affine map")))
}

/// Iterates `Lⁱγ` branchwise in closed form. Piecewise affine maps only.
pub struct ExactRoute;

struct ExactPrepared {
    phi: PiecewiseFn,
    branches: Vec<AffinePiece>,
}

struct ExactStream<'s> {
    prep: &'s ExactPrepared,
    current: PiecewiseFn,
}

impl CorrelationRoute for ExactRoute {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn supports(&self, sys: &IntervalSystem) -> bool {
        sys.map().is_affine()
    }

    fn prepare<'a>(&self, sys: &'a IntervalSystem, phi: &PiecewiseFn) -> Result<Box<dyn PreparedRoute + 'a>> {
        let branches = affine_or_unsupported(sys, self.name())?;
        Ok(Box::new(ExactPrepared { phi: phi.clone(), branches }))
    }
}

impl PreparedRoute for ExactPrepared {
    fn route_name(&self) -> &'static str {
        "exact"
    }

    fn stream<'s>(&'s self, gamma: &PiecewiseFn) -> Result<Box<dyn CorrelationStream + 's>> {
        Ok(Box::new(ExactStream { prep: self, current: gamma.clone() }))
    }
}

impl CorrelationStream for ExactStream<'_> {
    fn next_term(&mut self) -> Result<C64> {
        let c = self.prep.phi.inner(&self.current);
        self.current = self.current.transfer_affine(&self.prep.branches);
        Ok(c)
    }
}

/// Pulls the observable forward instead, `cᵢ = ∫(φ∘fⁱ)·γ dm`. The
/// compositions are cached and shared by every stream of one preparation.
pub struct OrbitRoute;

struct OrbitPrepared {
    branches: Vec<AffinePiece>,
    cache: Mutex<Vec<Arc<PiecewiseFn>>>,
}

impl OrbitPrepared {
    fn composed(&self, i: usize) -> Result<Arc<PiecewiseFn>> {
        let mut cache = self.cache.lock().expect("orbit cache poisoned");
        while cache.len() <= i {
            let next = cache.last().expect("cache starts with φ").compose_affine(&self.branches);
            if next.piece_count() > ORBIT_PIECE_CAP {
                return Err(Error::unsupported(format!(
                    "φ∘f^{} has {} pieces, above the orbit-route cap {ORBIT_PIECE_CAP}; use the exact route",
                    cache.len(),
                    next.piece_count()
                )));
            }
            cache.push(Arc::new(next));
        }
        Ok(cache[i].clone())
    }
}

struct OrbitStream<'s> {
    prep: &'s OrbitPrepared,
    gamma: PiecewiseFn,
    i: usize,
}

impl CorrelationRoute for OrbitRoute {
    fn name(&self) -> &'static str {
        "orbit"
    }

    fn supports(&self, sys: &IntervalSystem) -> bool {
        sys.map().is_affine()
    }

    fn prepare<'a>(&self, sys: &'a IntervalSystem, phi: &PiecewiseFn) -> Result<Box<dyn PreparedRoute + 'a>> {
        let branches = affine_or_unsupported(sys, self.name())?;
        Ok(Box::new(OrbitPrepared { branches, cache: Mutex::new(vec![Arc::new(phi.clone())]) }))
    }
}

impl PreparedRoute for OrbitPrepared {
    fn route_name(&self) -> &'static str {
        "orbit"
    }

    fn stream<'s>(&'s self, gamma: &PiecewiseFn) -> Result<Box<dyn CorrelationStream + 's>> {
        Ok(Box::new(OrbitStream { prep: self, gamma: gamma.clone(), i: 0 }))
    }
}

impl CorrelationStream for OrbitStream<'_> {
    fn next_term(&mut self) -> Result<C64> {
        let f = self.prep.composed(self.i)?;
        self.i += 1;
        Ok(f.inner(&self.gamma))
    }
}

/// Ulam matrix powers on bin averages. Works for every map; `γ` has its
/// discrete `Φ₁` part removed first so that the blocks see only `K`.
pub struct UlamRoute;

struct UlamPrepared<'a> {
    sys: &'a IntervalSystem,
    phi_bins: Vec<C64>,
}

struct UlamStream<'s> {
    prep: &'s UlamPrepared<'s>,
    current: Vec<C64>,
}

impl CorrelationRoute for UlamRoute {
    fn name(&self) -> &'static str {
        "ulam"
    }

    fn supports(&self, _sys: &IntervalSystem) -> bool {
        true
    }

    fn prepare<'a>(&self, sys: &'a IntervalSystem, phi: &PiecewiseFn) -> Result<Box<dyn PreparedRoute + 'a>> {
        Ok(Box::new(UlamPrepared { sys, phi_bins: sys.bin_averages(phi) }))
    }
}

impl PreparedRoute for UlamPrepared<'_> {
    fn route_name(&self) -> &'static str {
        "ulam"
    }

    fn stream<'s>(&'s self, gamma: &PiecewiseFn) -> Result<Box<dyn CorrelationStream + 's>> {
        let mut g = self.sys.bin_averages(gamma);
        let fixed = self.sys.decomposition().projector_one().apply(&g);
        for (a, b) in g.iter_mut().zip(fixed) {
            *a -= b;
        }
        Ok(Box::new(UlamStream { prep: self, current: g }))
    }
}

impl<'s> CorrelationStream for UlamStream<'s> {
    fn next_term(&mut self) -> Result<C64> {
        let u = self.prep.sys.ulam();
        let c = u.pair(&self.prep.phi_bins, &self.current);
        self.current = u.push_forward(&self.current);
        Ok(c)
    }
}

/// Named correlation routes. `"auto"` resolves to the exact route on
/// piecewise affine maps and to the Ulam route otherwise.
pub struct RouteRegistry {
    routes: BTreeMap<&'static str, Box<dyn CorrelationRoute>>,
}

impl Default for RouteRegistry {
    fn default() -> Self {
        let mut r = RouteRegistry { routes: BTreeMap::new() };
        r.register(Box::new(ExactRoute));
        r.register(Box::new(OrbitRoute));
        r.register(Box::new(UlamRoute));
        r
    }
}

impl RouteRegistry {
    pub fn empty() -> Self {
        RouteRegistry { routes: BTreeMap::new() }
    }

    pub fn register(&mut self, route: Box<dyn CorrelationRoute>) {
        self.routes.insert(route.name(), route);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.routes.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn CorrelationRoute> {
        self.routes
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::invalid(format!("unknown route `{name}`; known: {}", self.names().join(", "))))
    }

    pub fn resolve(&self, name: &str, sys: &IntervalSystem) -> Result<&dyn CorrelationRoute> {
        let route = if name == "auto" {
            self.get(if sys.map().is_affine() { "exact" } else { "ulam" })?
        } else {
            self.get(name)?
        };
        if !route.supports(sys) {
            return Err(Error::unsupported(format!(
                "route `{}` does not support the map `{}`",
                route.name(),
                sys.map().name()
            )));
        }
        Ok(route)
    }
}
