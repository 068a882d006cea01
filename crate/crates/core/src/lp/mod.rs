//! Linear programs over log-pivots: construction, floating point solution
//! and exact certification.

pub mod certify;
pub mod model;
pub mod simplex;
pub mod sparse_lu;

pub use certify::{
    certify, exact_simplex, exact_simplex_with_vertex, solve_float, solve_float_with, verify_certificate, verify_multipliers,
    wilkinson_closed_form_dual, wilkinson_closed_form_lower, wilkinson_dual_for,
    wilkinson_primal_point, CertMethod, Certificate, CertifiedBound, ClosedFormObjective,
    PrimalDualSolution,
};
pub use model::{
    build_geomean_lp, build_geomean_lp_with, build_improved_lp, build_improved_lp_with,
    build_wilkinson_lp, build_wilkinson_lp_with, ceil_sqrt2_times, check_log_pivot_feasibility,
    check_pivot_feasibility, cumulative_transform, export_lp, import_lp, rhs_enclosure,
    ConstraintRow, FeasibilityProgram, FeasibilityReport, Form, LpInstance, Objective, Program,
    RhsExpr, Selector,
};
pub use simplex::{Pricing, SimplexOptions, Status};
