#include "kerrlearn/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "kerrlearn/version.hpp"

namespace kerr {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("sha256_file: cannot open " + path.string());

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("sha256_file: EVP context allocation");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256_file: digest init failed");
  }

  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx, buf, std::size_t(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw std::runtime_error("sha256_file: digest update failed");
    }
  }

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256_file: digest final failed");
  }
  EVP_MD_CTX_free(ctx);

  std::string hex(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i)
    std::snprintf(&hex[2 * i], 3, "%02x", digest[i]);
  return hex;
}

void write_manifest(const std::filesystem::path& out_dir,
                    const std::string& command,
                    const nlohmann::json& config_echo,
                    const std::vector<std::filesystem::path>& files,
                    const nlohmann::json& extras) {
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;

  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::tm utc{};
  gmtime_r(&t, &utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
  manifest["timestamp_utc"] = stamp;

  manifest["config"] = config_echo;
  if (!extras.empty()) manifest["extras"] = extras;

  nlohmann::json file_list = nlohmann::json::array();
  for (const auto& path : files) {
    file_list.push_back(nlohmann::json{
        {"name", path.filename().string()},
        {"bytes", std::filesystem::file_size(path)},
        {"sha256", sha256_file(path)},
    });
  }
  manifest["files"] = file_list;

  const std::filesystem::path out = out_dir / ("manifest_" + command + ".json");
  std::ofstream stream(out, std::ios::binary | std::ios::trunc);
  if (!stream)
    throw std::runtime_error("write_manifest: cannot open " + out.string());
  stream << manifest.dump(2) << '\n';
  if (!stream)
    throw std::runtime_error("write_manifest: write failed " + out.string());
}

}  // namespace kerr
