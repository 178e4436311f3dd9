//! Dense index newtypes for the entities of a game structure.

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

id_type!(
    /// Position of an agent in the structure's declared agent order.
    AgentId
);
id_type!(
    /// A world state of a game structure.
    StateId
);
id_type!(
    /// An action identifier. Index 0 is always the reserved `noOp`.
    ActionId
);
id_type!(
    /// An atomic proposition.
    PropId
);

/// The distinguished do-nothing action.
pub const NOOP: ActionId = ActionId(0);

/// Reserved spelling of [`NOOP`] in every textual format.
pub const NOOP_NAME: &str = "noOp";
