//! Example programs embedded at compile time and loadable by name.
//!
//! Each asset is a complete source file in the surface syntax accepted by
//! [`crate::parser::parse_program`]: clauses plus `memo`/`delay`/`abstract`
//! directives. The flagship asset, `dutch_cg`, is a categorial grammar for a
//! Dutch verb-cluster fragment whose lexical categories are built lazily by
//! delayed constraints; it exercises every policy feature at once.

use alloc::string::String;
use core::fmt;

use crate::parser::parse_program;
use crate::policy::Policy;
use crate::program::Program;

/// A named example program bundled into the library.
pub struct BundledAsset {
    /// Identifier accepted by [`load_bundled`].
    pub name: &'static str,
    /// One-line summary of what the program demonstrates.
    pub description: &'static str,
    /// Complete program text.
    pub source: &'static str,
}

/// All bundled example programs.
pub const ASSETS: &[BundledAsset] = &[
    BundledAsset {
        name: "dutch_cg",
        description: "Dutch verb-cluster categorial grammar with delayed \
                      category constraints, memoized string predicate, and \
                      word-list goal abstraction",
        source: include_str!("assets/dutch_cg.lt"),
    },
    BundledAsset {
        name: "transitive_closure",
        description: "left-recursive graph reachability; loops under plain \
                      depth-first search, terminates when memoized",
        source: include_str!("assets/transitive_closure.lt"),
    },
    BundledAsset {
        name: "memo_loop",
        description: "smallest self-recursive program: one table, no solutions",
        source: include_str!("assets/memo_loop.lt"),
    },
    BundledAsset {
        name: "right_recursive_dcg",
        description: "right-recursive difference-list grammar over a single \
                      terminal",
        source: include_str!("assets/right_recursive_dcg.lt"),
    },
];

/// Error returned by [`load_bundled`] for names not present in [`ASSETS`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAssetError {
    /// The name that was requested.
    pub name: String,
}

impl fmt::Display for UnknownAssetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown bundled program `{}`", self.name)?;
        write!(f, " (available:")?;
        for (i, asset) in ASSETS.iter().enumerate() {
            write!(f, "{} {}", if i == 0 { "" } else { "," }, asset.name)?;
        }
        write!(f, ")")
    }
}

/// Looks up a bundled asset by name.
pub fn find_asset(name: &str) -> Option<&'static BundledAsset> {
    ASSETS.iter().find(|asset| asset.name == name)
}

/// Parses the bundled program with the given name.
pub fn load_bundled(name: &str) -> Result<(Program, Policy), UnknownAssetError> {
    let asset = find_asset(name).ok_or_else(|| UnknownAssetError {
        name: String::from(name),
    })?;
    let parsed = parse_program(asset.source)
        .expect("bundled program sources are well-formed");
    Ok(parsed)
}
