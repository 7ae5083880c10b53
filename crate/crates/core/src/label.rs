use std::fmt;

use crate::error::{Error, Result};

/// Number of expression categories.
pub const NUM_CLASSES: usize = 8;

/// The eight expression categories with their fixed on-disk encoding.
///
/// The numeric order doubles as the column order in evaluation reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum ExpressionClass {
    Neutral = 0,
    Anger = 1,
    Disgust = 2,
    Fear = 3,
    Happy = 4,
    Sad = 5,
    Surprise = 6,
    Other = 7,
}

impl ExpressionClass {
    /// All classes in encoding order.
    pub const ALL: [ExpressionClass; NUM_CLASSES] = [
        ExpressionClass::Neutral,
        ExpressionClass::Anger,
        ExpressionClass::Disgust,
        ExpressionClass::Fear,
        ExpressionClass::Happy,
        ExpressionClass::Sad,
        ExpressionClass::Surprise,
        ExpressionClass::Other,
    ];

    pub fn from_index(index: u8) -> Result<Self> {
        Self::ALL
            .get(index as usize)
            .copied()
            .ok_or(Error::InvalidLabel(index))
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ExpressionClass::Neutral => "Neutral",
            ExpressionClass::Anger => "Anger",
            ExpressionClass::Disgust => "Disgust",
            ExpressionClass::Fear => "Fear",
            ExpressionClass::Happy => "Happy",
            ExpressionClass::Sad => "Sad",
            ExpressionClass::Surprise => "Surprise",
            ExpressionClass::Other => "Other",
        }
    }
}

impl fmt::Display for ExpressionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl TryFrom<u8> for ExpressionClass {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Self::from_index(value)
    }
}
