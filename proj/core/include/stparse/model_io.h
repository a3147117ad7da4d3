#ifndef STPARSE_MODEL_IO_H_
#define STPARSE_MODEL_IO_H_

// Versioned binary container for ParserModel. Layout (little-endian):
//   magic "STPARSE\0", u32 version, then length-prefixed sections for the
//   feature model, trainer metadata, supertag inventory, embedded PCA model
//   (text form), action labels, feature dictionary and the float weight table.
// Loading a container with a different version is a DataError.

#include <cstdint>
#include <string>
#include <string_view>

#include "stparse/parser.h"

namespace stparse {

inline constexpr uint32_t kModelVersion = 1;

std::string SerializeModel(const ParserModel& model);
ParserModel DeserializeModel(std::string_view bytes);

void SaveModel(const ParserModel& model, const std::string& path);
ParserModel LoadModel(const std::string& path);

}  // namespace stparse

#endif  // STPARSE_MODEL_IO_H_
