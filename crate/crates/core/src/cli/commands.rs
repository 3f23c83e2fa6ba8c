//! Geometry resolution and command execution for scenario steps.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::expr;
use super::report::{CatalogEntry, EigenvalueEntry, GridInfo, RefinementEntry, StepReport};
use super::scenario::{Scenario, UserChart};
use crate::audits::{
    audit_eigen_bounds_refined, audit_heintze_karcher, audit_minkowski, eigen_bound_reports, AuditReport,
    EigenHypotheses, Relation, SpectralValues, EIGEN_TOLERANCE, INTEGRAL_TOLERANCE, MARGIN_TOLERANCE,
};
use crate::calculus::{christoffel_and_curvature, Mdim};
use crate::chart::catalog::Geometry;
use crate::chart::{build_chart_manifold, metric_fn, Axis, ChartManifold, ParamDomain, ScalarFn};
use crate::error::{Error, Result};
use crate::hypersurface::{audit_almost_schur, CatalogHypersurface, EmbeddingFn, SchurTarget};
use crate::integrate::{convergence_order, integrate_weighted_volume, RefinementSeries};
use crate::reilly::{reilly_refinement, RESIDUAL_CONSTANT};
use crate::spectral::{boundary_spectrum, eigen_boundary_weighted, eigen_closed, eigen_steklov};
use crate::tensor::{pair_count, TensorField};

/// Minimum observed order accepted by `verify-reilly`.
pub const REILLY_MIN_ORDER: f64 = 1.8;

/// Relative residual below which a refinement study sits on round-off.
const ROUND_OFF: f64 = 1e-12;

const SURFACES: [&str; 5] = ["sphere", "ellipsoid", "torus", "sphere-in-s3", "sphere-in-h3"];

/// Where the manifold of a step comes from.
#[derive(Clone, Debug)]
pub enum Source {
    Catalog { geometry: Geometry, radius: f64 },
    User(UserChart),
    Surface(CatalogHypersurface),
}

/// A manifold at one refinement level.
pub struct Built {
    pub manifold: ChartManifold,
    /// Second fundamental form of a hypersurface.
    pub shape: Option<TensorField>,
    pub level: usize,
}

impl Built {
    pub fn grid(&self) -> GridInfo {
        grid_info(self.manifold.domain(), self.level, self.manifold.stencil_order())
    }
}

fn grid_info(d: &ParamDomain, level: usize, stencil_order: usize) -> GridInfo {
    GridInfo { level, resolution: d.shape().to_vec(), nodes: d.len(), h: d.max_spacing(), stencil_order }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Input(format!("{name} must be positive, got {x}")))
    }
}

fn nonnegative(name: &str, x: f64) -> Result<f64> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Input(format!("{name} must be a finite nonnegative number, got {x}")))
    }
}

impl Source {
    pub fn resolve(sc: &Scenario) -> Result<Source> {
        if let Some(chart) = &sc.chart {
            if sc.geometry.as_deref().is_some_and(|g| g != "user") {
                return Err(Error::Input("a scenario with a [chart] table must not name a catalog geometry".into()));
            }
            validate_chart(chart)?;
            return Ok(Source::User(chart.clone()));
        }
        let id = sc.geometry.as_deref().ok_or_else(|| Error::Input("no geometry given".into()))?;
        let radius = positive("radius", sc.radius.unwrap_or(1.0))?;
        if let Some(geometry) = Geometry::from_id(id) {
            return Ok(Source::Catalog { geometry, radius });
        }
        let surface = match id {
            "sphere" => CatalogHypersurface::Sphere { radius },
            "ellipsoid" => {
                let axes = sc.axes.clone().unwrap_or_else(|| vec![1.0, 1.0, 1.2]);
                if axes.len() != 3 {
                    return Err(Error::Input(format!("ellipsoid needs 3 semi-axes, got {}", axes.len())));
                }
                CatalogHypersurface::Ellipsoid {
                    a: positive("axes", axes[0])?,
                    b: positive("axes", axes[1])?,
                    c: positive("axes", axes[2])?,
                }
            }
            "torus" => {
                let major = positive("major", sc.major.unwrap_or(2.0))?;
                let minor = positive("minor", sc.minor.unwrap_or(1.0))?;
                if minor >= major {
                    return Err(Error::Input("torus needs minor < major".into()));
                }
                CatalogHypersurface::Torus { major, minor }
            }
            "sphere-in-s3" => {
                if radius >= std::f64::consts::PI {
                    return Err(Error::Input("geodesic radius in S^3 must be below pi".into()));
                }
                CatalogHypersurface::SphereInS3 { radius }
            }
            "sphere-in-h3" => CatalogHypersurface::SphereInH3 { radius },
            _ => {
                let known: Vec<&str> = Geometry::ALL.iter().map(|g| g.id()).chain(SURFACES).collect();
                return Err(Error::Input(format!("unknown geometry \"{id}\" (known: {})", known.join(", "))));
            }
        };
        Ok(Source::Surface(surface))
    }

    pub fn id(&self) -> String {
        match self {
            Source::Catalog { geometry, .. } => geometry.id().into(),
            Source::User(_) => "user".into(),
            Source::Surface(s) => s.id().into(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Source::Catalog { geometry, .. } => geometry.dim(),
            Source::User(c) => c.coordinates.len(),
            Source::Surface(_) => 2,
        }
    }

    /// Catalog charts and surfaces are locally conformally flat; user charts
    /// must assert it.
    pub fn conformally_flat(&self) -> bool {
        !matches!(self, Source::User(_)) || self.dim() == 2
    }

    /// Names usable in field expressions.
    pub fn variables(&self) -> Vec<String> {
        match self {
            Source::Catalog { geometry, .. } => geometry.variables().into_iter().map(String::from).collect(),
            Source::User(c) => c.coordinates.clone(),
            Source::Surface(s) => {
                let params: &[&str] = match s {
                    CatalogHypersurface::Torus { .. } => &["u", "v"],
                    _ => &["theta", "psi"],
                };
                let ambient = ["x", "y", "z", "w"];
                let big = s.space_form().ambient_dim(2);
                params.iter().chain(&ambient[..big]).map(|s| s.to_string()).collect()
            }
        }
    }

    fn values(&self) -> EmbeddingFn {
        match self {
            Source::Catalog { geometry, radius } => {
                let (g, r) = (*geometry, *radius);
                Arc::new(move |p| g.variable_values(p, r))
            }
            Source::User(_) => Arc::new(|p| p.to_vec()),
            Source::Surface(s) => {
                let x = s.embedding();
                Arc::new(move |p| {
                    let mut v = p.to_vec();
                    v.extend(x(p));
                    v
                })
            }
        }
    }

    /// Compile a field expression over [`Source::variables`].
    pub fn compile(&self, src: &str) -> Result<ScalarFn> {
        let vars = self.variables();
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let values = self.values();
        expr::compile(src, &names, move |p| values(p))
    }

    /// Points per axis at `level`: periodic axes double, bounded axes double
    /// their intervals.
    fn resolution(&self, sc: &Scenario, level: usize) -> Result<Vec<usize>> {
        let (base, periodic): (Vec<usize>, Vec<bool>) = match self {
            Source::Catalog { geometry, .. } => {
                let d = geometry.domain(&geometry.resolution(0))?;
                let periodic = d.axes().iter().map(Axis::is_periodic).collect();
                (sc.resolution.clone().unwrap_or_else(|| geometry.resolution(0)), periodic)
            }
            Source::User(c) => (
                sc.resolution.clone().unwrap_or_else(|| c.resolution.clone()),
                (0..c.coordinates.len()).map(|a| c.periodic.get(a).copied().unwrap_or(false)).collect(),
            ),
            Source::Surface(_) => unreachable!("surface grids come from the catalog"),
        };
        if base.len() != periodic.len() {
            return Err(Error::Input(format!("resolution needs {} entries, got {}", periodic.len(), base.len())));
        }
        base.iter()
            .zip(&periodic)
            .map(|(&r, &p)| {
                if r < 2 {
                    return Err(Error::Input(format!("resolution entries must be at least 2, got {r}")));
                }
                Ok(if p { r << level } else { ((r - 1) << level) + 1 })
            })
            .collect()
    }

    /// The parameter domain at `level`.
    pub fn domain(&self, sc: &Scenario, level: usize) -> Result<ParamDomain> {
        match self {
            Source::Catalog { geometry, .. } => geometry.domain(&self.resolution(sc, level)?),
            Source::User(c) => {
                let res = self.resolution(sc, level)?;
                let axes = (0..c.coordinates.len())
                    .map(|a| {
                        let (name, lo, hi) = (&c.coordinates[a], c.lower[a], c.upper[a]);
                        if c.periodic.get(a).copied().unwrap_or(false) {
                            Axis::periodic(name, lo, hi, res[a])
                        } else {
                            Axis::bounded(name, lo, hi, res[a])
                        }
                    })
                    .collect();
                ParamDomain::new(axes)
            }
            Source::Surface(s) => {
                if sc.resolution.is_some() {
                    return Err(Error::Unsupported("resolution cannot be set for catalog hypersurfaces".into()));
                }
                s.domain(level)
            }
        }
    }

    /// The manifold with the step's φ, V and stencil order at `level`.
    pub fn build(&self, ctx: &StepContext, level: usize) -> Result<Built> {
        let order = ctx.stencil_order;
        let (manifold, shape) = match self {
            Source::Catalog { geometry, radius } => {
                let res = self.resolution(&ctx.scenario, level)?;
                (geometry.chart(&res, *radius, ctx.phi.clone(), ctx.v.clone())?, None)
            }
            Source::User(c) => {
                let domain = self.domain(&ctx.scenario, level)?;
                (build_chart_manifold(domain, user_metric(c)?, ctx.phi.clone(), ctx.v.clone())?, None)
            }
            Source::Surface(s) => {
                let hs = s.build(level, order)?;
                let m = hs.with_weights(ctx.phi.clone(), ctx.v.clone())?;
                (m, Some(hs.second_fundamental_form))
            }
        };
        Ok(Built { manifold: manifold.with_stencil_order(order), shape, level })
    }
}

fn validate_chart(c: &UserChart) -> Result<()> {
    let n = c.coordinates.len();
    if n < 2 {
        return Err(Error::InvalidDomain("a user chart needs at least 2 coordinates".into()));
    }
    for (key, len) in [("lower", c.lower.len()), ("upper", c.upper.len()), ("resolution", c.resolution.len())] {
        if len != n {
            return Err(Error::Input(format!("chart.{key} needs {n} entries, got {len}")));
        }
    }
    if !c.periodic.is_empty() && c.periodic.len() != n {
        return Err(Error::Input(format!("chart.periodic needs {n} entries, got {}", c.periodic.len())));
    }
    if c.metric.len() != pair_count(n) {
        return Err(Error::Input(format!(
            "chart.metric needs the {} upper-triangle entries, got {}",
            pair_count(n),
            c.metric.len()
        )));
    }
    if let Some(a) = (0..n).find(|&a| !(c.lower[a] < c.upper[a])) {
        return Err(Error::InvalidDomain(format!("axis {} has lower >= upper", c.coordinates[a])));
    }
    Ok(())
}

fn user_metric(c: &UserChart) -> Result<crate::chart::MetricFn> {
    let n = c.coordinates.len();
    let names: Vec<&str> = c.coordinates.iter().map(String::as_str).collect();
    let entries = c.metric.iter().map(|e| expr::Expr::parse(e, &names)).collect::<Result<Vec<_>>>()?;
    Ok(metric_fn(move |p| {
        let mut g = DMatrix::zeros(n, n);
        let mut it = entries.iter();
        for i in 0..n {
            for j in i..n {
                let v = it.next().expect("packed metric").eval(p);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }))
}

/// A resolved step: geometry, compiled weights and settings.
pub struct StepContext {
    pub scenario: Scenario,
    pub source: Source,
    pub phi: ScalarFn,
    pub v: ScalarFn,
    pub stencil_order: usize,
}

impl StepContext {
    pub fn new(sc: &Scenario) -> Result<Self> {
        let source = Source::resolve(sc)?;
        let stencil_order = sc.stencil_order.unwrap_or(4);
        if !matches!(stencil_order, 2 | 4 | 6 | 8) {
            return Err(Error::Input(format!("stencil_order must be 2, 4, 6 or 8, got {stencil_order}")));
        }
        let phi = source.compile(sc.phi.as_deref().unwrap_or("0"))?;
        let v = source.compile(sc.v.as_deref().unwrap_or("1"))?;
        Ok(Self { scenario: sc.clone(), source, phi, v, stencil_order })
    }

    fn build(&self, level: usize) -> Result<Built> {
        self.source.build(self, level)
    }

    /// Builds at `level − 1` and `level` concurrently.
    fn build_pair(&self, level: usize) -> Result<(Built, Built)> {
        let (a, b) = rayon::join(|| self.build(level - 1), || self.build(level));
        Ok((a?, b?))
    }

    fn mdim(&self) -> Result<Mdim> {
        match &self.scenario.m {
            Some(m) => m.to_mdim(),
            None => Ok(Mdim::Finite(self.source.dim() as f64)),
        }
    }

    fn default_level(&self, low_dim: usize, high_dim: usize) -> usize {
        self.scenario.level.unwrap_or(if self.source.dim() <= 2 { low_dim } else { high_dim })
    }

    fn step(&self, command: String) -> StepReport {
        StepReport {
            command,
            geometry: Some(self.source.id()),
            parameters: self.scenario.parameters(),
            ..Default::default()
        }
    }
}

/// Check-type audits compare a measured error with a tolerance; they are
/// never reported as sharp.
fn check(name: &str, lhs: f64, rhs: f64, relation: Relation) -> AuditReport {
    let mut a = AuditReport::new(name, lhs, rhs, relation, vec![], MARGIN_TOLERANCE);
    a.sharp = false;
    a
}

/// Run one step.
pub fn execute(sc: &Scenario) -> Result<StepReport> {
    let (command, sub) = sc.command_parts()?;
    if command == "catalog" {
        return Ok(catalog());
    }
    let ctx = StepContext::new(sc)?;
    match command.as_str() {
        "verify-reilly" => verify_reilly(&ctx),
        "eig" => eig(&ctx, sub.as_deref().ok_or_else(|| Error::Input("eig needs a problem".into()))?),
        "audit" => audit(&ctx, sub.as_deref().ok_or_else(|| Error::Input("audit needs a kind".into()))?),
        "converge" => converge(&ctx),
        other => Err(Error::Input(format!(
            "unknown command \"{other}\" (known: verify-reilly, eig, audit, converge, catalog)"
        ))),
    }
}

fn verify_reilly(ctx: &StepContext) -> Result<StepReport> {
    let sc = &ctx.scenario;
    let levels = sc.levels.unwrap_or(4);
    if levels < 3 {
        return Err(Error::InsufficientRefinements { needed: 3, got: levels });
    }
    let base = sc.base_level.unwrap_or(0);
    let f = ctx.source.compile(sc.f.as_deref().ok_or_else(|| Error::Input("verify-reilly needs f".into()))?)?;
    let study = reilly_refinement(levels, |l| {
        let b = ctx.build(base + l)?;
        let fs = b.manifold.sample(f.clone())?;
        Ok((b.manifold, fs))
    })?;
    let mut step = ctx.step("verify-reilly".into());
    step.grid = Some(grid_info(&ctx.source.domain(sc, base + levels - 1)?, base + levels - 1, ctx.stencil_order));
    for (l, b) in study.levels.iter().enumerate() {
        let rel = b.relative_residual();
        step.refinement.push(RefinementEntry { level: base + l, h: b.h, value: rel, error: Some(rel) });
    }
    let finest = study.finest().expect("at least three levels");
    let names = ["boundary_ii", "boundary_h", "boundary_cross", "interior_square", "interior_hessian", "interior_ricci"];
    for (name, t) in names.iter().zip(finest.terms()) {
        step.diagnostic(name, t);
    }
    step.diagnostic("residual", finest.residual);
    step.diagnostic("scale", finest.scale);
    step.push_audit(check(
        "reilly-residual",
        finest.relative_residual(),
        RESIDUAL_CONSTANT * finest.h.powf(1.5),
        Relation::AtMost,
    ));
    let order = study.order.expect("at least three levels");
    step.diagnostic("order", order.order);
    if finest.relative_residual() <= ROUND_OFF && order.plateau && order.used < 3 {
        step.diagnostic("order_plateau", 1.0);
    } else {
        step.push_audit(check("reilly-order", order.order, REILLY_MIN_ORDER, Relation::AtLeast));
    }
    Ok(step)
}

/// (β, eigenvalue, pencil residual) of one eigenproblem at one level.
fn eigenvalues(problem: &str, m: &ChartManifold, betas: &[f64]) -> Result<Vec<(Option<f64>, f64, f64)>> {
    let one = |r: crate::spectral::EigResult| vec![(r.beta, r.eigenvalue, r.residual_norm)];
    Ok(match problem {
        "closed" => one(eigen_closed(m)?),
        "boundary" => one(eigen_boundary_weighted(m)?),
        "steklov" => one(eigen_steklov(m)?),
        "wentzell" => boundary_spectrum(m, betas)?
            .wentzell
            .into_iter()
            .map(|r| (r.beta, r.eigenvalue, r.residual_norm))
            .collect(),
        _ => {
            return Err(Error::Input(format!(
                "unknown eigenproblem \"{problem}\" (known: closed, boundary, steklov, wentzell)"
            )))
        }
    })
}

fn wentzell_betas(sc: &Scenario, problem: &str) -> Result<Vec<f64>> {
    if problem != "wentzell" {
        if sc.beta.is_some() || sc.betas.is_some() {
            return Err(Error::Input(format!("beta does not apply to the {problem} problem")));
        }
        return Ok(vec![]);
    }
    let betas = match (&sc.betas, sc.beta) {
        (Some(b), None) => b.clone(),
        (None, b) => vec![b.unwrap_or(1.0)],
        (Some(_), Some(_)) => return Err(Error::Input("give either beta or betas, not both".into())),
    };
    if betas.is_empty() {
        return Err(Error::Input("betas is empty".into()));
    }
    Ok(betas)
}

fn eig(ctx: &StepContext, problem: &str) -> Result<StepReport> {
    let sc = &ctx.scenario;
    let betas = wentzell_betas(sc, problem)?;
    let level = ctx.default_level(3, 2);
    let extrapolate = sc.extrapolate.unwrap_or(true) && level > 0;
    let mut step = ctx.step(format!("eig {problem}"));
    let fine = ctx.build(level)?;
    step.grid = Some(fine.grid());
    let h = fine.manifold.domain().max_spacing();
    let raw_entry = |(beta, value, res): (Option<f64>, f64, f64), level: usize, h: f64| EigenvalueEntry {
        problem: problem.to_string(),
        beta,
        level,
        h,
        value,
        residual_norm: Some(res),
        method: "raw",
    };
    let best: Vec<(Option<f64>, f64)> = if extrapolate {
        let coarse = ctx.build(level - 1)?;
        let (c, f) = rayon::join(
            || eigenvalues(problem, &coarse.manifold, &betas),
            || eigenvalues(problem, &fine.manifold, &betas),
        );
        let (c, f) = (c?, f?);
        let hc = coarse.manifold.domain().max_spacing();
        step.eigenvalues.extend(c.iter().map(|&e| raw_entry(e, level - 1, hc)));
        step.eigenvalues.extend(f.iter().map(|&e| raw_entry(e, level, h)));
        let ext: Vec<(Option<f64>, f64)> = c
            .iter()
            .zip(&f)
            .map(|(a, b)| (b.0, crate::integrate::richardson(a.1, b.1, 2.0, 2.0)))
            .collect();
        step.eigenvalues.extend(ext.iter().map(|&(beta, value)| EigenvalueEntry {
            problem: problem.to_string(),
            beta,
            level,
            h,
            value,
            residual_norm: None,
            method: "extrapolated",
        }));
        ext
    } else {
        let f = eigenvalues(problem, &fine.manifold, &betas)?;
        step.eigenvalues.extend(f.iter().map(|&e| raw_entry(e, level, h)));
        f.iter().map(|e| (e.0, e.1)).collect()
    };
    if let Some(exact) = sc.exact {
        if best.len() != 1 {
            return Err(Error::Input("exact needs a single eigenproblem (one beta)".into()));
        }
        let err = (best[0].1 - exact).abs() / exact.abs().max(1e-300);
        step.push_audit(check(&format!("eig-{problem}"), err, EIGEN_TOLERANCE, Relation::AtMost));
    }
    Ok(step)
}

fn audit(ctx: &StepContext, kind: &str) -> Result<StepReport> {
    let mut step = ctx.step(format!("audit {kind}"));
    match kind {
        "heintze-karcher" | "minkowski" => {
            let mdim = ctx.mdim()?;
            let b = ctx.build(ctx.default_level(2, 1))?;
            step.grid = Some(b.grid());
            let report = if kind == "minkowski" {
                audit_minkowski(&b.manifold, mdim)?
            } else {
                audit_heintze_karcher(&b.manifold, mdim)?
            };
            step.push_audit(report);
        }
        "eigen-bounds" => eigen_bounds(ctx, &mut step)?,
        "schur" => {
            let target = schur_target(ctx)?;
            let b = ctx.build(ctx.default_level(2, 2))?;
            step.grid = Some(b.grid());
            step.push_audit(audit_almost_schur(&b.manifold, &target, b.shape.as_ref(), ctx.scenario.k1)?);
        }
        _ => {
            return Err(Error::Input(format!(
                "unknown audit \"{kind}\" (known: heintze-karcher, minkowski, eigen-bounds, schur)"
            )))
        }
    }
    Ok(step)
}

fn eigen_bounds(ctx: &StepContext, step: &mut StepReport) -> Result<()> {
    let sc = &ctx.scenario;
    let mdim = ctx.mdim()?;
    let k = nonnegative("K", sc.curvature_k.unwrap_or(0.0))?;
    let beta = nonnegative("beta", sc.beta.unwrap_or(1.0))?;
    if sc.betas.is_some() {
        return Err(Error::Input("eigen-bounds takes a single beta".into()));
    }
    let level = ctx.default_level(3, 2);
    let extrapolate = sc.extrapolate.unwrap_or(true) && level > 0;
    let (reports, best, raw, fine) = if extrapolate {
        let (coarse, fine) = ctx.build_pair(level)?;
        let (reports, ext, raw) = audit_eigen_bounds_refined(&coarse.manifold, &fine.manifold, mdim, k, beta)?;
        (reports, Some(ext), raw, fine)
    } else {
        let fine = ctx.build(level)?;
        let (hyp, values) = rayon::join(
            || EigenHypotheses::compute(&fine.manifold, mdim),
            || SpectralValues::compute(&fine.manifold, beta),
        );
        let values = values?;
        (eigen_bound_reports(&values, &hyp?, mdim, k)?, None, values, fine)
    };
    step.grid = Some(fine.grid());
    let h = fine.manifold.domain().max_spacing();
    let mut push = |values: &SpectralValues, method: &'static str| {
        for (problem, b, value) in
            [("boundary", None, values.eta1), ("steklov", None, values.p1), ("wentzell", Some(beta), values.lambda)]
        {
            step.eigenvalues.push(EigenvalueEntry {
                problem: problem.into(),
                beta: b,
                level,
                h,
                value,
                residual_norm: None,
                method,
            });
        }
    };
    push(&raw, "raw");
    if let Some(ext) = &best {
        push(ext, "extrapolated");
    }
    for r in reports {
        step.push_audit(r);
    }
    step.push_audit(AuditReport::new(
        "wentzell-splitting",
        raw.lambda,
        raw.p1 + beta * raw.eta1,
        Relation::AtLeast,
        vec![],
        INTEGRAL_TOLERANCE,
    ));
    Ok(())
}

fn trailing_index(target: &str, prefix: &str) -> Option<usize> {
    target.strip_prefix(prefix).filter(|d| !d.is_empty()).and_then(|d| d.parse().ok())
}

fn schur_target(ctx: &StepContext) -> Result<SchurTarget> {
    let sc = &ctx.scenario;
    let name = sc.target.as_deref().unwrap_or("h");
    let conformally_flat = sc.conformally_flat.unwrap_or_else(|| ctx.source.conformally_flat());
    Ok(match name {
        "h" => SchurTarget::MeanCurvature,
        "r" => SchurTarget::ScalarCurvature,
        "s" => SchurTarget::Newton(sc.r.unwrap_or(1)),
        "sigma" => SchurTarget::Schouten { k: sc.k.unwrap_or(1), conformally_flat },
        _ => {
            if let Some(k) = trailing_index(name, "sigma") {
                SchurTarget::Schouten { k, conformally_flat }
            } else if let Some(r) = trailing_index(name, "s") {
                SchurTarget::Newton(r)
            } else {
                return Err(Error::InvalidTarget(format!("unknown target \"{name}\" (known: h, s, r, sigma)")));
            }
        }
    })
}

fn converge(ctx: &StepContext) -> Result<StepReport> {
    let sc = &ctx.scenario;
    let quantity = sc.quantity.as_deref().ok_or_else(|| Error::Input("converge needs a quantity".into()))?;
    let levels = sc.levels.unwrap_or(4);
    let base = sc.base_level.unwrap_or(0);
    let mut step = ctx.step(format!("converge {quantity}"));
    let (entries, referenced): (Vec<(f64, f64)>, bool) = match quantity {
        "reilly" => {
            let f = ctx.source.compile(sc.f.as_deref().ok_or_else(|| Error::Input("converge reilly needs f".into()))?)?;
            let study = reilly_refinement(levels, |l| {
                let b = ctx.build(base + l)?;
                let fs = b.manifold.sample(f.clone())?;
                Ok((b.manifold, fs))
            })?;
            (study.levels.iter().map(|b| (b.h, b.relative_residual())).collect(), true)
        }
        "closed" | "boundary" | "steklov" | "wentzell" | "volume" | "ricci" => {
            let betas = wentzell_betas(sc, quantity)?;
            if betas.len() > 1 {
                return Err(Error::Input("converge takes a single beta".into()));
            }
            let values = (0..levels)
                .into_par_iter()
                .map(|l| {
                    let b = ctx.build(base + l)?;
                    let m = &b.manifold;
                    let value = match quantity {
                        "volume" => integrate_weighted_volume(m, &vec![1.0; m.len()]),
                        "ricci" => ricci_error(&ctx.source, m)?,
                        _ => eigenvalues(quantity, m, &betas)?[0].1,
                    };
                    Ok((m.domain().max_spacing(), value))
                })
                .collect::<Result<Vec<_>>>()?;
            (values, quantity == "ricci")
        }
        _ => {
            return Err(Error::Input(format!(
                "unknown quantity \"{quantity}\" (known: reilly, closed, boundary, steklov, wentzell, volume, ricci)"
            )))
        }
    };
    step.grid = Some(grid_info(&ctx.source.domain(sc, base + levels - 1)?, base + levels - 1, ctx.stencil_order));
    let errors: Vec<Option<f64>> = match (referenced, sc.exact) {
        (true, _) => entries.iter().map(|e| Some(e.1.abs())).collect(),
        (false, Some(exact)) => entries.iter().map(|e| Some((e.1 - exact).abs())).collect(),
        (false, None) => (0..entries.len()).map(|l| entries.get(l + 1).map(|n| (n.1 - entries[l].1).abs())).collect(),
    };
    let mut series = RefinementSeries::new();
    for (l, (&(h, value), &error)) in entries.iter().zip(&errors).enumerate() {
        step.refinement.push(RefinementEntry { level: base + l, h, value, error });
        if let Some(e) = error {
            series.push(h, e)?;
        }
    }
    let order = convergence_order(&series, None)?;
    step.diagnostic("order", order.order);
    step.diagnostic("plateau", if order.plateau { 1.0 } else { 0.0 });
    step.diagnostic("levels_used", order.used as f64);
    Ok(step)
}

/// Largest entry of Ric − Ric_exact for catalog charts with known curvature.
fn ricci_error(source: &Source, m: &ChartManifold) -> Result<f64> {
    let Source::Catalog { geometry, radius } = source else {
        return Err(Error::Unsupported("ricci convergence needs a catalog chart".into()));
    };
    let (_, ric) = christoffel_and_curvature(m)?;
    let d = m.domain();
    Ok(ric.max_deviation(|k| geometry.ricci(&d.point(k), *radius)))
}

fn catalog() -> StepReport {
    let mut step = StepReport { command: "catalog".into(), ..Default::default() };
    for g in Geometry::ALL {
        step.catalog.push(CatalogEntry {
            id: g.id().into(),
            kind: "chart",
            dim: g.dim(),
            closed: g.is_closed(),
            variables: g.variables().into_iter().map(String::from).collect(),
            description: g.description().into(),
        });
    }
    let surfaces = [
        (CatalogHypersurface::Sphere { radius: 1.0 }, "round sphere of radius `radius` in R^3"),
        (CatalogHypersurface::Ellipsoid { a: 1.0, b: 1.0, c: 1.2 }, "ellipsoid with semi-axes `axes` in R^3"),
        (CatalogHypersurface::Torus { major: 2.0, minor: 1.0 }, "torus of revolution with radii `major`, `minor` in R^3"),
        (CatalogHypersurface::SphereInS3 { radius: 1.0 }, "geodesic sphere of radius `radius` in S^3"),
        (CatalogHypersurface::SphereInH3 { radius: 1.0 }, "geodesic sphere of radius `radius` in H^3"),
    ];
    for (s, description) in surfaces {
        step.catalog.push(CatalogEntry {
            id: s.id().into(),
            kind: "hypersurface",
            dim: 2,
            closed: true,
            variables: Source::Surface(s).variables(),
            description: description.into(),
        });
    }
    step
}
