use crate::StateId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("rule {rule}: syntax error at byte {offset}: {message}")]
    Syntax {
        rule: usize,
        offset: usize,
        message: String,
    },

    #[error("DFA blow-up: more than {cap} states")]
    StateBlowup { cap: usize },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("state id out of range: {id} (state count {n})")]
    StateOutOfRange { id: u64, n: usize },

    #[error("unreachable state(s): {}", join_ids(.0))]
    Unreachable(Vec<StateId>),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dense similarity graph refused: {n} states exceeds cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("unresolvable transition from state {state} on symbol {symbol}")]
    Unresolvable { state: StateId, symbol: usize },

    #[error("symbol {symbol} outside alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: usize, alphabet_size: usize },

    #[error("invalid forest: {0}")]
    InvalidForest(String),

    #[error("graph is disconnected: node {0} unreachable from the start node")]
    Disconnected(StateId),

    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join_ids(ids: &[StateId]) -> String {
    let shown: Vec<String> = ids.iter().take(16).map(|id| id.to_string()).collect();
    if ids.len() > 16 {
        format!("{} ... ({} total)", shown.join(" "), ids.len())
    } else {
        shown.join(" ")
    }
}
