pub mod algrel;
pub mod cfmat;
pub mod cli;
pub mod field;
pub mod identity;
pub mod par;
pub mod seqgen;
