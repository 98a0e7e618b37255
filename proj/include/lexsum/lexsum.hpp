#pragma once

#include "lexsum/backend.hpp"
#include "lexsum/config.hpp"
#include "lexsum/corpus.hpp"
#include "lexsum/error.hpp"
#include "lexsum/extractor.hpp"
#include "lexsum/http_backend.hpp"
#include "lexsum/kmeans.hpp"
#include "lexsum/mock_backend.hpp"
#include "lexsum/mock_server.hpp"
#include "lexsum/pipeline.hpp"
#include "lexsum/planner.hpp"
#include "lexsum/report.hpp"
#include "lexsum/rouge.hpp"
#include "lexsum/text.hpp"
#include "lexsum/tokens.hpp"
