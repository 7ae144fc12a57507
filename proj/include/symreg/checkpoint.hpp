#pragma once

#include <string>

#include "symreg/backbone.hpp"

namespace symreg {

// Model checkpoint: magic "SYMREGM1", a little-endian u64 header length, a
// JSON header (architecture config + parameter manifest), then raw
// little-endian float32 parameter blobs in manifest order.

void save_checkpoint(const Backbone& model, const std::string& path);
Backbone load_checkpoint(const std::string& path);

}  // namespace symreg
