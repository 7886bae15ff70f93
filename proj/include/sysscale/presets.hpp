#pragma once

#include "sysscale/soc.hpp"

namespace sysscale {

/// Two-level mobile SoC: a 1.6GHz LPDDR3 / 0.8GHz interconnect high point
/// and a 1.06GHz / 0.4GHz low point, 4.5W TDP. This is the same config as
/// data/skylake-like.cfg.
SocConfig skylake_like_config();

} // namespace sysscale
