#include "spectral/fld_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "common/error.hpp"

namespace kgeft {

static_assert(std::endian::native == std::endian::little, "fld writer assumes a little-endian host");

void write_fld(const std::filesystem::path& path, const Field& f, const std::string& name, double time) {
  nlohmann::json h;
  h["format"] = "kgeft-fld/1";
  h["grid"] = {{"dim", f.grid().dim}, {"n_per_axis", f.grid().n}, {"box_length", f.grid().length}};
  h["space"] = f.space() == Space::physical ? "physical" : "fourier";
  h["time"] = time;
  h["name"] = name;
  h["count"] = f.size();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot open " + path.string());
  const std::string header = h.dump();
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.put('\n');
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(Complex)));
  require(static_cast<bool>(out), ErrorCode::IoError, "write failed for " + path.string());
}

FldRecord read_fld(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, "bad fld header in " + path.string() + ": " + e.what());
  }
  GridSpec g{h.at("grid").at("dim").get<int>(), h.at("grid").at("n_per_axis").get<int>(),
             h.at("grid").at("box_length").get<double>()};
  g.validate();
  CVec v(g.size());
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(Complex)));
  require(static_cast<std::size_t>(in.gcount()) == v.size() * sizeof(Complex), ErrorCode::IoError,
          "truncated fld payload in " + path.string());
  const Space s = h.at("space").get<std::string>() == "fourier" ? Space::fourier : Space::physical;
  return {Field(g, s, std::move(v)), h.value("name", std::string{}), h.value("time", 0.0)};
}

}  // namespace kgeft
