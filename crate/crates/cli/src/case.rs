use std::path::Path;

use pdqubo::flowsheets::{build_ds_discrete, build_il_discrete, bundled_ds, bundled_il, DsDesignSpace, IlDesignSpace};
use pdqubo::ip::BinaryProgram;

use crate::fail::{input_error, Context, Outcome, Tag};
use crate::CaseKind;

/// A loaded case: the discrete program plus, for IL, the design space the
/// continuous evaluator needs.
pub struct Case {
    pub kind: CaseKind,
    pub program: BinaryProgram,
    pub il: Option<IlDesignSpace>,
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path)
        .input()
        .context(format!("reading {}", path.display()))
}

pub fn load(kind: CaseKind, model: Option<&Path>, params: Option<&Path>) -> Outcome<Case> {
    match kind {
        CaseKind::Il => {
            if model.is_some() {
                return Err(input_error("--model applies to --case custom only"));
            }
            let space = match params {
                Some(p) => IlDesignSpace::from_json(&read(p)?)
                    .input()
                    .context(format!("parameter file {}", p.display()))?,
                None => bundled_il(),
            };
            let program = build_il_discrete(&space).input()?;
            Ok(Case {
                kind,
                program,
                il: Some(space),
            })
        }
        CaseKind::Ds => {
            if model.is_some() {
                return Err(input_error("--model applies to --case custom only"));
            }
            let space = match params {
                Some(p) => DsDesignSpace::from_json(&read(p)?)
                    .input()
                    .context(format!("parameter file {}", p.display()))?,
                None => bundled_ds(),
            };
            let program = build_ds_discrete(&space).input()?;
            Ok(Case {
                kind,
                program,
                il: None,
            })
        }
        CaseKind::Custom => {
            if params.is_some() {
                return Err(input_error("--params does not apply to --case custom"));
            }
            let path = model.ok_or_else(|| input_error("--case custom requires --model"))?;
            let program = BinaryProgram::from_json(&read(path)?)
                .input()
                .context(format!("model file {}", path.display()))?;
            Ok(Case {
                kind,
                program,
                il: None,
            })
        }
    }
}
