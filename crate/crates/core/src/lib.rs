pub mod arith;
pub mod classgroup;
pub mod diophantine;
pub mod fieldparams;
pub mod quadform;
pub mod theorem;
