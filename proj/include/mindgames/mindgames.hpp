#pragma once

// Everything except the HTTP front end and the model client, which pull in
// cpp-httplib.

#include "mindgames/action.hpp"
#include "mindgames/core.hpp"
#include "mindgames/game.hpp"
#include "mindgames/generator.hpp"
#include "mindgames/io.hpp"
#include "mindgames/metrics.hpp"
#include "mindgames/persuaders.hpp"
#include "mindgames/prompts.hpp"
#include "mindgames/protocol.hpp"
#include "mindgames/scenarios.hpp"
#include "mindgames/service.hpp"
#include "mindgames/target.hpp"
#include "mindgames/text.hpp"
#include "mindgames/view.hpp"
