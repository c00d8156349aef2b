//! Translation of typed definitions into flat constraint models.

mod lowering;
mod model;
mod render;

pub use lowering::{
    lower_action_inhabitance, lower_device, lower_expr, lower_expr_in, lower_type_inhabitance,
    sort_of_ty, LowerError,
};
pub use model::{
    name_to_path, path_name, qualified_name, split_name, ConstraintModel, FlatExpr, Sort,
};
pub use render::{debug_expr, interchange_expr, render_model, Dialect};
