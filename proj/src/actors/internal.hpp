#pragma once

#include "martsia/actors/actors.hpp"

namespace martsia::actors::detail {

/// Per-authority metadata file; identical across honest authorities.
Json metadata_document(const std::vector<std::string>& authorities, const maabe::Universes& u);

}  // namespace martsia::actors::detail
