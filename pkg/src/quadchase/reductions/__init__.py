"""Encoders that materialize hard problems as quad-systems, paired with
independent brute-force oracles for differential testing."""

from .cfg import (
    CFG,
    CfgOracleVerdict,
    cfg_intersection_oracle,
    cfg_membership,
    encode_cfg_pair,
    parse_cfg,
)
from .horn import (
    HornClause,
    HornVerdict,
    encode_horn,
    horn_sat_oracle,
    pad_to_pure,
    parse_horn,
)
from .dtm import (
    DTM,
    dtm_oracle,
    encode_dtm,
    parse_dtm,
)

__all__ = [
    "CFG", "CfgOracleVerdict", "cfg_intersection_oracle", "cfg_membership",
    "encode_cfg_pair", "parse_cfg",
    "HornClause", "HornVerdict", "encode_horn", "horn_sat_oracle",
    "pad_to_pure", "parse_horn",
    "DTM", "dtm_oracle", "encode_dtm", "parse_dtm",
]
