#include "partcrop/manifest.hpp"

#include <fstream>
#include <unordered_set>

#include "partcrop/errors.hpp"
#include "partcrop/png_io.hpp"
#include "partcrop/rng.hpp"
#include "partcrop/synthetic_data.hpp"

namespace partcrop {

using nlohmann::json;

void DatasetManifest::validate() const {
  if (image_size.h == 0 || image_size.w == 0 || image_size.c == 0) {
    throw InvalidInput("manifest image_size must be positive");
  }
  std::unordered_set<std::string> ids;
  for (const auto& e : entries) {
    if (!ids.insert(e.id).second) throw InvalidInput("duplicate manifest id '" + e.id + "'");
    if (e.path.has_value() == e.gen.has_value()) {
      throw InvalidInput("entry '" + e.id + "' needs exactly one of path/gen");
    }
    if (e.membership == Membership::unknown) throw InvalidInput("entry '" + e.id + "' lacks membership");
  }
  if (count(Membership::member) == 0 || count(Membership::nonmember) == 0) {
    throw InvalidInput("manifest needs both members and non-members");
  }
}

std::size_t DatasetManifest::count(Membership m) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.membership == m ? 1 : 0;
  return n;
}

json manifest_to_json(const DatasetManifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json j = {{"id", e.id}, {"membership", to_string(e.membership)}};
    if (e.path) j["path"] = *e.path;
    if (e.gen) j["gen"] = {{"generator", e.gen->generator}, {"seed", e.gen->seed}};
    entries.push_back(std::move(j));
  }
  return {{"name", manifest.name},
          {"image_size", {manifest.image_size.h, manifest.image_size.w, manifest.image_size.c}},
          {"entries", std::move(entries)}};
}

DatasetManifest manifest_from_json(const json& j, std::filesystem::path base_dir) {
  DatasetManifest m;
  m.base_dir = std::move(base_dir);
  try {
    m.name = j.value("name", std::string{});
    const auto& size = j.at("image_size");
    if (!size.is_array() || size.size() != 3) throw InvalidInput("image_size must be [h, w, c]");
    m.image_size = {size[0].get<std::size_t>(), size[1].get<std::size_t>(), size[2].get<std::size_t>()};
    for (const auto& je : j.at("entries")) {
      ManifestEntry e;
      e.id = je.at("id").get<std::string>();
      e.membership = membership_from_string(je.at("membership").get<std::string>());
      if (je.contains("path")) e.path = je.at("path").get<std::string>();
      if (je.contains("gen")) {
        const auto& g = je.at("gen");
        e.gen = GeneratorSpec{g.value("generator", std::string("textured_shapes")),
                              g.at("seed").get<std::uint64_t>()};
      }
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("manifest schema: ") + e.what());
  }
  m.validate();
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("manifest " + path.string() + ": " + e.what());
  }
  return manifest_from_json(j, path.parent_path());
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest_to_json(manifest).dump(2) << '\n';
}

Image load_image(const DatasetManifest& manifest, const ManifestEntry& entry) {
  if (entry.gen) {
    if (entry.gen->generator != "textured_shapes") {
      throw InvalidInput("unknown generator '" + entry.gen->generator + "'");
    }
    return generate_synthetic_image(entry.gen->seed, manifest.image_size);
  }
  if (!entry.path) throw InvalidInput("entry '" + entry.id + "' has no image source");
  std::filesystem::path p(*entry.path);
  if (p.is_relative()) p = manifest.base_dir / p;
  return read_png(p);
}

std::uint64_t entry_hash(const ManifestEntry& entry) { return fnv1a64(entry.id); }

std::unordered_set<std::uint64_t> member_fingerprints(const DatasetManifest& manifest) {
  std::unordered_set<std::uint64_t> out;
  for (const auto& e : manifest.entries) {
    if (e.membership == Membership::member) out.insert(fingerprint(load_image(manifest, e)));
  }
  return out;
}

}  // namespace partcrop
