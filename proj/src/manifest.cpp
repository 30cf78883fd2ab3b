#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "uwbpulse/cli.hpp"
#include "uwbpulse/errors.hpp"
#include "uwbpulse/io.hpp"

#ifndef UWBPULSE_VERSION
#define UWBPULSE_VERSION "dev"
#endif

namespace uwbpulse::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    throw Error("sha256: OpenSSL digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

fs::path write_manifest(const std::string& command, const json& cfg, const Artifacts& art) {
  const fs::path out = cfg.at("out").get<std::string>();
  json m;
  m["tool"] = "uwbpulse";
  m["version"] = UWBPULSE_VERSION;
  m["manifest_schema"] = kManifestSchema;
  m["command"] = command;
  m["config"] = cfg;
  m["schema_versions"] = {{"pulse_csv", kPulseCsvSchema}, {"table_csv", 1}, {"report_json", 1}};
  json ins = json::array();
  for (const auto& p : art.inputs) {
    const auto text = read_text(p);
    ins.push_back({{"path", p.generic_string()}, {"sha256", sha256_hex(text)}, {"bytes", text.size()}});
  }
  m["inputs"] = ins;
  json outs = json::array();
  for (const auto& p : art.outputs) {
    const auto text = read_text(p);
    outs.push_back({{"path", fs::relative(p, out).generic_string()}, {"sha256", sha256_hex(text)}, {"bytes", text.size()}});
  }
  m["outputs"] = outs;
  const fs::path path = out / "manifest.json";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << m.dump(2) << '\n';
  return path;
}

}  // namespace uwbpulse::cli
