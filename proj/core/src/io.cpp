#include "esg/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "esg/errors.hpp"

namespace esg::io {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string() + " for reading");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void atomic_write(const std::filesystem::path& path,
                  std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);

  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + tmp.string() + " for writing");
    }
    out.write(contents.data(),
              static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw IoError("short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place: " +
                  ec.message());
  }
}

}  // namespace esg::io
