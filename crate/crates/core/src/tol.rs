//! Central numeric tolerances. Every hard-coded threshold used by solvers,
//! invariant checks, and the acceptance gate lives here with its rationale,
//! so tuning happens in one place and tests can reference the same numbers.

/// Root-finding tolerance for the rectifying change of variables. Newton on a
/// smooth strictly-monotone map converges quadratically; 1e-12 leaves two
/// digits of slack against the 1e-10 acceptance residual.
pub const RECTIFY_NEWTON: f64 = 1e-12;

/// Maximum Newton iterations before the safeguarded bisection fallback kicks in.
pub const RECTIFY_MAX_ITER: usize = 50;

/// Acceptance: rectification identity residual, all families, all orders.
pub const RECTIFY_RESIDUAL: f64 = 1e-10;

/// Acceptance: |Y^{-1}(eta) - eta| must scale like eta^{nu+1}; allowed slope
/// deviation on the log-log fit.
pub const RECTIFY_SLOPE_TOL: f64 = 0.3;

/// Acceptance: stationary-phase truncation-error slope tolerance around N3+1.
pub const SPHM_SLOPE_TOL: f64 = 0.3;

/// Acceptance: relative error of the leading stationary-phase term on the
/// product-Gaussian benchmark at theta = 0.1 must match 4.96e-3 within 5%.
pub const SPHM_BENCH_REL: f64 = 0.05;

/// Acceptance: resonance-suppression slope tolerance around 1 (non-FM
/// amplitudes scale like the slow-time scale ratio).
pub const SUPPRESSION_SLOPE_TOL: f64 = 0.2;

/// Acceptance: FM window amplitudes must stay flat in the same sweep.
pub const FM_FLAT_SLOPE: f64 = 0.2;

/// Acceptance: accuracy-ladder slope tolerances for the three envelope
/// columns (relative error ~ beta, beta^2, beta^3).
pub const LADDER_SLOPE_TOL_1: f64 = 0.3;
pub const LADDER_SLOPE_TOL_2: f64 = 0.3;
pub const LADDER_SLOPE_TOL_3: f64 = 0.4;

/// Acceptance: superposition residual slope must be at least this steep in
/// rho/beta (interaction of distinct carriers is non-resonant to all orders).
pub const SUPERPOSITION_MIN_SLOPE: f64 = 3.0;

/// Acceptance: envelope solver L2-norm relative drift over a conservative run.
pub const ENLS_L2_DRIFT: f64 = 1e-8;

/// Acceptance: exact-soliton peak-amplitude relative drift over unit slow time.
pub const SOLITON_PEAK_DRIFT: f64 = 1e-3;

/// Acceptance: linear Gaussian dispersion-decay factor accuracy (the peak
/// decays to 2^{-1/4} of its initial value at the matched time).
pub const LINEAR_DECAY_REL: f64 = 0.01;

/// Acceptance: sourced-equation identity max|V - psi Z| after the ramp.
pub const SOURCE_FORM_RESIDUAL: f64 = 1e-8;

/// Acceptance: lattice-to-continuum deviation slope lower bound.
pub const LATTICE_CONTINUUM_MIN_SLOPE: f64 = 0.8;

/// Acceptance: lattice symbol Taylor-defect slope (the symbol matches the
/// band jet to second order, so the defect scales like the cube).
pub const LATTICE_SYMBOL_SLOPE: f64 = 3.0;
pub const LATTICE_SYMBOL_SLOPE_TOL: f64 = 0.3;

/// Acceptance: time-harmonic truncation slope tolerances (orders N1 = 0, 1).
pub const HARMONIC_SLOPE_TOL_N0: f64 = 0.2;
pub const HARMONIC_SLOPE_TOL_N1: f64 = 0.3;

/// Acceptance: bidirectional cross-coupling rho-slope tolerance around 1.
pub const CROSS_SLOPE_TOL: f64 = 0.2;

/// Acceptance: with the cross coefficient zeroed the doublets must decouple
/// to this level (pure round-off through the split-step machinery).
pub const CROSS_DECOUPLE: f64 = 1e-10;

/// Plane-wave band solver: eigenvalue gap below which the band labeling is
/// ambiguous and overlap kernels are refused.
pub const BAND_DEGENERACY_GAP: f64 = 1e-6;

/// Genericity margins: quantities that the theory requires nonzero are
/// rejected when they fall below this (scaled by the natural band scale).
pub const GENERICITY_MARGIN: f64 = 1e-6;

/// Selection-rule classifier: |phase| below this at the window centers is
/// treated as resonant (FM); used also as the refusal threshold for the
/// non-resonant normal-form division.
pub const PHASE_MIN: f64 = 1e-3;

/// Adaptive quadrature: default absolute/relative tolerance split.
pub const QUAD_TOL: f64 = 1e-11;

/// Envelope split-step: maximum nonlinear phase advance per step, radians.
/// Steps violating this are rejected and the step size is refused up front.
pub const ENLS_MAX_NL_PHASE: f64 = 0.1;

/// Spectral content allowed at the grid edge (window-leakage / aliasing flag).
pub const EDGE_LEAKAGE: f64 = 1e-10;
