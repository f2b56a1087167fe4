#pragma once

#include "sigbandit/bandit.hpp"
#include "sigbandit/config.hpp"
#include "sigbandit/envs.hpp"
#include "sigbandit/error.hpp"
#include "sigbandit/harness.hpp"
#include "sigbandit/linalg.hpp"
#include "sigbandit/path.hpp"
#include "sigbandit/replay.hpp"
#include "sigbandit/results_io.hpp"
#include "sigbandit/signature.hpp"
#include "sigbandit/signature_oracle.hpp"
