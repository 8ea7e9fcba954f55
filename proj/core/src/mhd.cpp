#include "segreg/mhd.hpp"

#include <array>
#include <cmath>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace segreg {

const char* to_string(MhdErrorCode code) {
  switch (code) {
    case MhdErrorCode::io:
      return "io";
    case MhdErrorCode::malformed_header:
      return "malformed_header";
    case MhdErrorCode::missing_key:
      return "missing_key";
    case MhdErrorCode::unknown_key:
      return "unknown_key";
    case MhdErrorCode::unsupported:
      return "unsupported";
    case MhdErrorCode::payload_size:
      return "payload_size";
  }
  return "unknown";
}

MhdError::MhdError(MhdErrorCode code, const std::string& message)
    : Error(std::string("mhd ") + to_string(code) + ": " + message), code_(code) {}

namespace {

static_assert(sizeof(float) == 4 && sizeof(double) == 8);

constexpr std::array kRequiredKeys{"ObjectType", "NDims", "DimSize", "ElementType", "ElementDataFile"};

// Keys other writers commonly emit that carry nothing we need. Orientation
// keys are accepted only when they describe the identity.
constexpr std::array kIgnoredKeys{"AnatomicalOrientation", "CenterOfRotation", "ElementSize", "Comment",
                                  "ObjectSubType", "Name", "HeaderSize", "Modality"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& key, const std::string& token) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw MhdError(MhdErrorCode::malformed_header, key + ": cannot parse '" + token + "' as a number");
  }
  return v;
}

long parse_int(const std::string& key, const std::string& token) {
  long v = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw MhdError(MhdErrorCode::malformed_header, key + ": cannot parse '" + token + "' as an integer");
  }
  return v;
}

Vec3 parse_vec3(const std::map<std::string, std::string>& h, const std::string& key, const Vec3& fallback) {
  const auto it = h.find(key);
  if (it == h.end()) return fallback;
  const auto toks = split_ws(it->second);
  if (toks.size() != 3) throw MhdError(MhdErrorCode::malformed_header, key + ": expected 3 values");
  return {parse_double(key, toks[0]), parse_double(key, toks[1]), parse_double(key, toks[2])};
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "True" || value == "true" || value == "1") return true;
  if (value == "False" || value == "false" || value == "0") return false;
  throw MhdError(MhdErrorCode::malformed_header, key + ": expected True or False, got '" + value + "'");
}

std::size_t element_size(ElementType t) {
  switch (t) {
    case ElementType::uchar:
      return 1;
    case ElementType::float32:
      return 4;
    case ElementType::float64:
      return 8;
  }
  return 0;
}

const char* element_name(ElementType t) {
  switch (t) {
    case ElementType::uchar:
      return "MET_UCHAR";
    case ElementType::float32:
      return "MET_FLOAT";
    case ElementType::float64:
      return "MET_DOUBLE";
  }
  return "";
}

ElementType parse_element_type(const std::string& name) {
  if (name == "MET_UCHAR") return ElementType::uchar;
  if (name == "MET_FLOAT") return ElementType::float32;
  if (name == "MET_DOUBLE") return ElementType::float64;
  throw MhdError(MhdErrorCode::unsupported, "ElementType " + name + " is not supported");
}

// The host is little-endian on every platform we target; payloads are
// little-endian by contract.
double decode(const unsigned char* p, ElementType t) {
  switch (t) {
    case ElementType::uchar:
      return static_cast<double>(*p);
    case ElementType::float32: {
      float f;
      std::memcpy(&f, p, 4);
      return static_cast<double>(f);
    }
    case ElementType::float64: {
      double d;
      std::memcpy(&d, p, 8);
      return d;
    }
  }
  return 0.0;
}

void encode(double v, ElementType t, unsigned char* p) {
  switch (t) {
    case ElementType::uchar: {
      const double r = std::round(v);
      p[0] = static_cast<unsigned char>(r < 0.0 ? 0.0 : (r > 255.0 ? 255.0 : r));
      return;
    }
    case ElementType::float32: {
      const auto f = static_cast<float>(v);
      std::memcpy(p, &f, 4);
      return;
    }
    case ElementType::float64:
      std::memcpy(p, &v, 8);
      return;
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string format_vec3(const Vec3& v) {
  return format_number(v[0]) + " " + format_number(v[1]) + " " + format_number(v[2]);
}

struct Header {
  Grid grid;
  int channels = 1;
  ElementType type = ElementType::float32;
  std::filesystem::path data_file;
};

Header parse_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MhdError(MhdErrorCode::io, "cannot open " + path.string());
  std::map<std::string, std::string> h;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw MhdError(MhdErrorCode::malformed_header, "line without '=': " + line);
    h[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  for (const char* key : kRequiredKeys) {
    if (!h.count(key)) throw MhdError(MhdErrorCode::missing_key, std::string(key) + " not found in " + path.string());
  }
  static const std::array known{"ObjectType",  "NDims",  "BinaryData", "BinaryDataByteOrderMSB", "ElementByteOrderMSB",
                                "ElementSpacing", "Offset", "Origin",  "Position",
                                "DimSize",     "ElementNumberOfChannels", "ElementType", "ElementDataFile",
                                "CompressedData", "TransformMatrix", "Rotation", "Orientation"};
  for (const auto& [key, value] : h) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    for (const char* k : kIgnoredKeys) ok = ok || key == k;
    if (!ok) throw MhdError(MhdErrorCode::unknown_key, "unrecognized header key '" + key + "'");
  }

  if (h["ObjectType"] != "Image") throw MhdError(MhdErrorCode::unsupported, "ObjectType must be Image");
  if (parse_int("NDims", h["NDims"]) != 3) throw MhdError(MhdErrorCode::unsupported, "only NDims = 3 is supported");
  if (h.count("BinaryData") && !parse_bool("BinaryData", h["BinaryData"])) {
    throw MhdError(MhdErrorCode::unsupported, "ASCII payloads are not supported");
  }
  for (const char* key : {"BinaryDataByteOrderMSB", "ElementByteOrderMSB"}) {
    if (h.count(key) && parse_bool(key, h[key])) {
      throw MhdError(MhdErrorCode::unsupported, "big-endian payloads are not supported");
    }
  }
  if (h.count("CompressedData") && parse_bool("CompressedData", h["CompressedData"])) {
    throw MhdError(MhdErrorCode::unsupported, "compressed payloads are not supported");
  }
  for (const char* key : {"TransformMatrix", "Rotation", "Orientation"}) {
    if (!h.count(key)) continue;
    const auto toks = split_ws(h[key]);
    if (toks.size() != 9) throw MhdError(MhdErrorCode::malformed_header, std::string(key) + ": expected 9 values");
    for (int i = 0; i < 9; ++i) {
      const double expect = (i % 4 == 0) ? 1.0 : 0.0;
      if (parse_double(key, toks[static_cast<std::size_t>(i)]) != expect) {
        throw MhdError(MhdErrorCode::unsupported, "non-identity orientation is not supported");
      }
    }
  }

  Header out;
  const auto dims = split_ws(h["DimSize"]);
  if (dims.size() != 3) throw MhdError(MhdErrorCode::malformed_header, "DimSize: expected 3 values");
  Index3 d{};
  for (int a = 0; a < 3; ++a) {
    const long v = parse_int("DimSize", dims[static_cast<std::size_t>(a)]);
    if (v < 1 || v > (1L << 24)) throw MhdError(MhdErrorCode::malformed_header, "DimSize out of range");
    d[a] = static_cast<int>(v);
  }
  const Vec3 spacing = parse_vec3(h, "ElementSpacing", {1.0, 1.0, 1.0});
  Vec3 origin{0.0, 0.0, 0.0};
  for (const char* key : {"Offset", "Origin", "Position"}) {
    if (h.count(key)) origin = parse_vec3(h, key, origin);
  }
  try {
    out.grid = Grid(d, spacing, origin);
  } catch (const InvalidArgument& e) {
    throw MhdError(MhdErrorCode::malformed_header, e.what());
  }
  if (h.count("ElementNumberOfChannels")) {
    const long c = parse_int("ElementNumberOfChannels", h["ElementNumberOfChannels"]);
    if (c != 1 && c != 3) throw MhdError(MhdErrorCode::unsupported, "ElementNumberOfChannels must be 1 or 3");
    out.channels = static_cast<int>(c);
  }
  out.type = parse_element_type(h["ElementType"]);
  const std::string data = h["ElementDataFile"];
  if (data == "LOCAL" || data == "LIST" || data.find('%') != std::string::npos) {
    throw MhdError(MhdErrorCode::unsupported, "ElementDataFile must name a single raw file");
  }
  out.data_file = path.parent_path() / data;
  return out;
}

std::vector<unsigned char> read_payload(const Header& h) {
  std::ifstream in(h.data_file, std::ios::binary);
  if (!in) throw MhdError(MhdErrorCode::io, "cannot open payload " + h.data_file.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t expected = h.grid.size() * static_cast<std::size_t>(h.channels) * element_size(h.type);
  if (bytes.size() != expected) {
    throw MhdError(MhdErrorCode::payload_size, h.data_file.string() + " holds " + std::to_string(bytes.size()) +
                                                   " bytes, header implies " + std::to_string(expected));
  }
  return bytes;
}

void write_header(const std::filesystem::path& header, const Grid& grid, int channels, ElementType type) {
  std::filesystem::path raw = header;
  raw.replace_extension(".raw");
  std::ostringstream out;
  out << "ObjectType = Image\n"
      << "NDims = 3\n"
      << "BinaryData = True\n"
      << "BinaryDataByteOrderMSB = False\n"
      << "ElementSpacing = " << format_vec3(grid.spacing) << "\n"
      << "Offset = " << format_vec3(grid.origin) << "\n"
      << "DimSize = " << grid.dims[0] << " " << grid.dims[1] << " " << grid.dims[2] << "\n"
      << "ElementNumberOfChannels = " << channels << "\n"
      << "ElementType = " << element_name(type) << "\n"
      << "ElementDataFile = " << raw.filename().string() << "\n";
  std::ofstream f(header, std::ios::binary);
  if (!f) throw MhdError(MhdErrorCode::io, "cannot write " + header.string());
  const std::string text = out.str();
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw MhdError(MhdErrorCode::io, "short write to " + header.string());
}

void write_payload(const std::filesystem::path& header, const std::vector<unsigned char>& bytes) {
  std::filesystem::path raw = header;
  raw.replace_extension(".raw");
  std::ofstream f(raw, std::ios::binary);
  if (!f) throw MhdError(MhdErrorCode::io, "cannot write " + raw.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw MhdError(MhdErrorCode::io, "short write to " + raw.string());
}

}  // namespace

MhdData read_mhd(const std::filesystem::path& header_path) {
  const Header h = parse_header(header_path);
  const std::vector<unsigned char> bytes = read_payload(h);
  const std::size_t es = element_size(h.type);
  if (h.channels == 3) {
    DisplacementField ddf(h.grid);
    for (std::size_t v = 0; v < h.grid.size(); ++v) {
      for (std::size_t c = 0; c < 3; ++c) ddf.vectors[v][c] = decode(&bytes[(3 * v + c) * es], h.type);
    }
    return ddf;
  }
  Volume vol(h.grid, VolumeKind::intensity);
  bool binary = h.type == ElementType::uchar;
  for (std::size_t v = 0; v < h.grid.size(); ++v) {
    const double x = decode(&bytes[v * es], h.type);
    vol.values[v] = x;
    binary = binary && (x == 0.0 || x == 1.0);
  }
  if (binary) vol.kind = VolumeKind::binary_mask;
  return vol;
}

Volume read_volume(const std::filesystem::path& header) {
  MhdData d = read_mhd(header);
  if (auto* v = std::get_if<Volume>(&d)) return std::move(*v);
  throw MhdError(MhdErrorCode::unsupported, header.string() + " holds a 3-channel field, expected a volume");
}

DisplacementField read_ddf(const std::filesystem::path& header) {
  MhdData d = read_mhd(header);
  if (auto* f = std::get_if<DisplacementField>(&d)) return std::move(*f);
  throw MhdError(MhdErrorCode::unsupported, header.string() + " holds a scalar volume, expected a 3-channel field");
}

ElementType default_element_type(VolumeKind kind) {
  return kind == VolumeKind::binary_mask ? ElementType::uchar : ElementType::float32;
}

void write_mhd(const Volume& volume, const std::filesystem::path& header, std::optional<ElementType> type) {
  const ElementType t = type.value_or(default_element_type(volume.kind));
  const std::size_t es = element_size(t);
  std::vector<unsigned char> bytes(volume.values.size() * es);
  for (std::size_t v = 0; v < volume.values.size(); ++v) encode(volume.values[v], t, &bytes[v * es]);
  write_header(header, volume.grid, 1, t);
  write_payload(header, bytes);
}

void write_mhd(const DisplacementField& ddf, const std::filesystem::path& header, ElementType type) {
  if (type == ElementType::uchar) throw MhdError(MhdErrorCode::unsupported, "displacement fields need a float type");
  const std::size_t es = element_size(type);
  std::vector<unsigned char> bytes(ddf.vectors.size() * 3 * es);
  for (std::size_t v = 0; v < ddf.vectors.size(); ++v) {
    for (std::size_t c = 0; c < 3; ++c) encode(ddf.vectors[v][c], type, &bytes[(3 * v + c) * es]);
  }
  write_header(header, ddf.grid, 3, type);
  write_payload(header, bytes);
}

}  // namespace segreg
