from .dst import (
    DeepSeaTreasure,
    DstMap,
    DstState,
    builtin_map,
    dst_reset,
    dst_step,
    dump_dst_map,
    load_dst_map,
    parse_dst_map,
)
from .fileformat import FormatError
from .minecart import (
    Mine,
    Minecart,
    MinecartConfig,
    MinecartState,
    default_mines,
    dump_minecart_config,
    load_minecart_config,
    minecart_reset,
    minecart_step,
    parse_minecart_config,
)
from .wrappers import FrameSkip, PixelObservation

__all__ = [
    "DeepSeaTreasure",
    "DstMap",
    "DstState",
    "FormatError",
    "FrameSkip",
    "Mine",
    "Minecart",
    "MinecartConfig",
    "MinecartState",
    "PixelObservation",
    "builtin_map",
    "default_mines",
    "dst_reset",
    "dst_step",
    "dump_dst_map",
    "dump_minecart_config",
    "load_dst_map",
    "load_minecart_config",
    "minecart_reset",
    "minecart_step",
    "parse_dst_map",
    "parse_minecart_config",
]
