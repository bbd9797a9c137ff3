#pragma once

#include "sand/error.hpp"
#include "sand/geometry.hpp"
#include "sand/deception.hpp"
#include "sand/message.hpp"
#include "sand/dep_graph.hpp"
#include "sand/universe.hpp"
#include "sand/node.hpp"
#include "sand/detectors.hpp"
#include "sand/adversary.hpp"
#include "sand/json_io.hpp"
#include "sand/sim.hpp"
#include "sand/verdicts.hpp"
#include "sand/config.hpp"
#include "sand/svg.hpp"
#include "sand/commands.hpp"
