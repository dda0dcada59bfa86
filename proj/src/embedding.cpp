#include "doc2tool/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "doc2tool/error.hpp"
#include "doc2tool/strings.hpp"

namespace doc2tool {

namespace {

std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

}  // namespace

LexicalEmbedding::LexicalEmbedding(size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::ConfigInvalid, "dimension", "must be positive");
}

std::vector<Vector> LexicalEmbedding::embed(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    Vector v(dimension_, 0.0);
    std::string body = str::trim(text);
    if (!body.empty()) {
      std::string padded = " " + str::to_lower(body) + " ";
      for (size_t i = 0; i + 3 <= padded.size(); ++i)
        v[fnv1a(std::string_view(padded).substr(i, 3)) % dimension_] += 1.0;
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 0.0)
        for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

RemoteEmbedding::RemoteEmbedding(std::shared_ptr<EmbeddingClient> client, size_t dimension)
    : client_(std::move(client)), dimension_(dimension) {}

std::vector<Vector> RemoteEmbedding::embed(const std::vector<std::string>& texts) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    for (const auto& t : texts)
      if (!cache_.count(t) && std::find(missing.begin(), missing.end(), t) == missing.end())
        missing.push_back(t);
  }
  if (!missing.empty()) {
    auto vectors = client_->embed(missing);
    std::lock_guard lock(mu_);
    for (size_t i = 0; i < missing.size(); ++i) {
      if (vectors[i].size() != dimension_)
        throw Error(ErrorCode::EmbeddingUnavailable, "embedding",
                    "expected dimension " + std::to_string(dimension_) + ", got " +
                        std::to_string(vectors[i].size()));
      cache_[missing[i]] = std::move(vectors[i]);
    }
  }
  std::lock_guard lock(mu_);
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(cache_.at(t));
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace doc2tool
