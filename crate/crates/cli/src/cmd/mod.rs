pub mod base;
pub mod geom;
pub mod prune;
pub mod realize;
pub mod sft;
pub mod subst;
pub mod tm;

use clap::Args;
use shiftlab_core::counting::Limits;

use crate::input::Loaded;
use crate::out::Report;

#[derive(Args, Debug, Clone, Copy)]
pub struct Budget {
    /// Live row states allowed in the transfer matrix [default: SHIFTLAB_MAX_STATES or 2^24]
    #[arg(long)]
    pub max_states: Option<u64>,
    /// Backtracking nodes allowed per enumeration
    #[arg(long)]
    pub node_limit: Option<u64>,
}

impl Budget {
    pub fn limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(m) = self.max_states {
            l.max_states = m;
        }
        if let Some(n) = self.node_limit {
            l.node_limit = n;
        }
        l
    }

    pub fn record(&self, r: &mut Report) {
        let l = self.limits();
        r.meta("max_states", l.max_states).meta("node_limit", l.node_limit);
    }
}

pub fn record_input<T>(r: &mut Report, key: &str, l: &Loaded<T>) {
    r.meta(key, &l.source).meta(&format!("{key}_sha256"), &l.sha256);
}
