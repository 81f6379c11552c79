#pragma once

// Umbrella header for the analysis library. The capture, execution and HTTP
// pieces (capture.hpp, execute.hpp, server.hpp) are included separately.

#include "analytics.hpp"
#include "bundle_json.hpp"
#include "diff.hpp"
#include "errors.hpp"
#include "identity.hpp"
#include "revision_model.hpp"
#include "secure_store.hpp"
#include "segmentation.hpp"
#include "session_format.hpp"
#include "similarity.hpp"
#include "storage.hpp"
