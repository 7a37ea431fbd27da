#pragma once

#include "gr1core/core_engine.hpp"
#include "gr1core/cs_analysis.hpp"
#include "gr1core/game.hpp"
#include "gr1core/game_server.hpp"
#include "gr1core/parser.hpp"
#include "gr1core/report.hpp"
#include "gr1core/sat.hpp"
#include "gr1core/unroller.hpp"
#include "gr1core/workspace.hpp"
