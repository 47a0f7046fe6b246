#pragma once

#include "phantom/alignment.hpp"
#include "phantom/analytics.hpp"
#include "phantom/client.hpp"
#include "phantom/error.hpp"
#include "phantom/masking.hpp"
#include "phantom/pipeline.hpp"
#include "phantom/probe.hpp"
#include "phantom/records.hpp"
#include "phantom/rng.hpp"
#include "phantom/segmentation.hpp"
#include "phantom/sha256.hpp"
#include "phantom/simulator.hpp"
#include "phantom/stopwords.hpp"
#include "phantom/taxonomy.hpp"
#include "phantom/vocab.hpp"
#include "phantom/words.hpp"
