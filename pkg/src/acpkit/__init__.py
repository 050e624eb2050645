"""Process algebra with conditional expressions, signals and retrospection."""
from .bisim import (
    Verdict,
    bisim,
    oracle_bisim,
    refined_retro_bisim,
    retro_split_bisim,
    sig_split_bisim,
    split_bisim,
    validate_witness,
)
from .conditions import (
    BOT,
    TOP,
    Cond,
    Endo,
    apply_endo,
    atom,
    boolean_op,
    last_action_update,
    leq,
    parse_cond,
    retro,
    retro_shift,
    retro_update,
    sup,
)
from .cts import Cts, conn, iso_check, load_cts, ts_combine, ts_par_retro, ts_retro_shift, ts_unary, ts_unfold, upd
from .errors import AcpError
from .rewrite import eq_axiomatic, normalize, substitute_eval
from .sos import cts_of, step
from .terms import AlgebraConfig, RecSpec, format_term, guardedness_check, load_spec, parse_proc, validate_config

__all__ = [
    "AcpError", "AlgebraConfig", "BOT", "Cond", "Cts", "Endo", "RecSpec", "TOP", "Verdict",
    "apply_endo", "atom", "bisim", "boolean_op", "conn", "cts_of", "eq_axiomatic", "format_term",
    "guardedness_check", "iso_check", "last_action_update", "leq", "load_cts", "load_spec", "normalize",
    "oracle_bisim", "parse_cond", "parse_proc", "refined_retro_bisim", "retro", "retro_shift", "retro_split_bisim", "retro_update",
    "sig_split_bisim", "split_bisim", "step", "substitute_eval", "sup", "ts_combine", "ts_par_retro",
    "ts_retro_shift", "ts_unary", "ts_unfold", "upd", "validate_config", "validate_witness",
]
