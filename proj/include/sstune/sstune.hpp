#pragma once

#include "sstune/common.hpp"
#include "sstune/format.hpp"
#include "sstune/ingest.hpp"
#include "sstune/pipeline.hpp"
#include "sstune/predict.hpp"
#include "sstune/random.hpp"
#include "sstune/sampler.hpp"
#include "sstune/segment.hpp"
#include "sstune/shard.hpp"
#include "sstune/task_file.hpp"
#include "sstune/unicode.hpp"
