#pragma once

#include "tnstream/dataset_io.hpp"
#include "tnstream/error.hpp"
#include "tnstream/harness.hpp"
#include "tnstream/metrics.hpp"
#include "tnstream/point_set.hpp"
#include "tnstream/snapshot_io.hpp"
#include "tnstream/snn_radius.hpp"
#include "tnstream/spatial_index.hpp"
#include "tnstream/stream_engine.hpp"
#include "tnstream/synthetic.hpp"
#include "tnstream/tn_graph.hpp"
