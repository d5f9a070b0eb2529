#pragma once

#include "kglb/types.hpp"
#include "kglb/dictionary.hpp"
#include "kglb/tuple_registry.hpp"
#include "kglb/label_store.hpp"
#include "kglb/graph.hpp"
#include "kglb/ingest.hpp"
#include "kglb/ontology.hpp"
#include "kglb/query.hpp"
#include "kglb/snapshot.hpp"
#include "kglb/bench.hpp"
