#pragma once

#include <filesystem>
#include <optional>
#include <variant>

#include "segreg/error.hpp"
#include "segreg/grid.hpp"

namespace segreg {

enum class ElementType { uchar, float32, float64 };

enum class MhdErrorCode {
  io,                // file missing or unreadable / unwritable
  malformed_header,  // line without '=' or unparsable value
  missing_key,
  unknown_key,
  unsupported,       // valid MetaImage we do not handle (NDims != 3, MSB, compression...)
  payload_size,      // raw file shorter or longer than DimSize implies
};

const char* to_string(MhdErrorCode code);

class MhdError : public Error {
 public:
  MhdError(MhdErrorCode code, const std::string& message);
  MhdErrorCode code() const { return code_; }

 private:
  MhdErrorCode code_;
};

using MhdData = std::variant<Volume, DisplacementField>;

/// Reads a MetaImage header plus its raw payload. Single-channel data loads
/// as a Volume (MET_UCHAR holding only 0/1 becomes a binary mask, anything
/// else an intensity volume); 3-channel data loads as a DisplacementField.
MhdData read_mhd(const std::filesystem::path& header);

/// read_mhd that insists on a single-channel volume.
Volume read_volume(const std::filesystem::path& header);
DisplacementField read_ddf(const std::filesystem::path& header);

/// Default storage: masks MET_UCHAR, everything else MET_FLOAT.
ElementType default_element_type(VolumeKind kind);

/// Writes `<stem>.mhd` and `<stem>.raw` side by side. The payload name is
/// derived from the header path. Output bytes depend only on the inputs.
void write_mhd(const Volume& volume, const std::filesystem::path& header,
               std::optional<ElementType> type = std::nullopt);
void write_mhd(const DisplacementField& ddf, const std::filesystem::path& header,
               ElementType type = ElementType::float32);

}  // namespace segreg
