#pragma once

// Umbrella header for the library (the CLI lives in cli.hpp).

#include "graph_deconv/bounds.hpp"
#include "graph_deconv/channel.hpp"
#include "graph_deconv/covariance.hpp"
#include "graph_deconv/csice.hpp"
#include "graph_deconv/dataset.hpp"
#include "graph_deconv/deconv.hpp"
#include "graph_deconv/errors.hpp"
#include "graph_deconv/graph.hpp"
#include "graph_deconv/io.hpp"
#include "graph_deconv/random.hpp"
#include "graph_deconv/simulation.hpp"
#include "graph_deconv/synthetic.hpp"
#include "graph_deconv/traversal.hpp"
