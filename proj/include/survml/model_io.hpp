#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "survml/learners.hpp"

namespace survml {

/// Major version of the text model format written by save_model.
inline constexpr int kModelFormatVersion = 1;

/// Writes one model document (see docs/model_format.md). Reals use the shortest
/// round-trip representation, so save -> load -> save is byte-identical.
void save_model(const TrainedModel& model, std::ostream& out);
std::string save_model(const TrainedModel& model);
void save_model_file(const TrainedModel& model, const std::filesystem::path& path);

/// Throws FormatError on malformed input or an unsupported major version.
TrainedModel load_model(std::istream& in);
TrainedModel load_model(const std::string& document);
TrainedModel load_model_file(const std::filesystem::path& path);

}  // namespace survml
