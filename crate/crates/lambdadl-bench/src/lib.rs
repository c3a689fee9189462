//! Shared fixtures for the benchmark suite.

use lambdadl::{Budget, KnowledgeBase, TableauReasoner};

pub const MUSIC_KB: &str = include_str!("../../../examples/music.kb");
pub const INFINITE_KB: &str = include_str!("../../../examples/infinite.kb");
pub const INFLUENCES_PROGRAM: &str = include_str!("../../../examples/influences_of_hendrix.ldl");

pub fn music_reasoner() -> TableauReasoner {
    TableauReasoner::with_budget(KnowledgeBase::parse(MUSIC_KB).unwrap(), Budget::default())
}

pub fn infinite_reasoner() -> TableauReasoner {
    TableauReasoner::with_budget(KnowledgeBase::parse(INFINITE_KB).unwrap(), Budget::default())
}
