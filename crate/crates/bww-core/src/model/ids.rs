//! Opaque identifiers for model elements.
//!
//! Each identifier is an index into the owning registry of one [`Model`].
//! Identifiers from one model are meaningless in another; lookups return
//! errors rather than panicking when handed a foreign id.
//!
//! [`Model`]: crate::model::Model

use std::fmt;

macro_rules! define_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub(crate) u32);

        impl $name {
            pub(crate) fn new(index: usize) -> Self {
                $name(index as u32)
            }

            pub(crate) fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}#{}", stringify!($name), self.0)
            }
        }
    };
}

define_id!(
    /// Identifies a property (intrinsic, mutual, or complex).
    PropertyId
);
define_id!(
    /// Identifies a thing. Id 0 is always the predefined null thing.
    ThingId
);
define_id!(
    /// Identifies a declared state of some thing.
    StateId
);
define_id!(
    /// Identifies a schema.
    SchemaId
);
define_id!(
    /// Identifies a class definition.
    ClassId
);
define_id!(
    /// Identifies a kind definition.
    KindId
);
define_id!(
    /// Identifies a declared process.
    ProcessId
);

/// The namespaces in which source names must be unique.
///
/// States and state variables are scoped per owning thing; every other
/// namespace is model-wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    Property,
    Thing,
    State,
    Schema,
    Class,
    Kind,
    Process,
    StateVariable,
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Namespace::Property => "property",
            Namespace::Thing => "thing",
            Namespace::State => "state",
            Namespace::Schema => "schema",
            Namespace::Class => "class",
            Namespace::Kind => "kind",
            Namespace::Process => "process",
            Namespace::StateVariable => "state variable",
        };
        f.write_str(s)
    }
}
