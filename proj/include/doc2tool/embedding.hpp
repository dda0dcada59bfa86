#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "doc2tool/remote.hpp"

namespace doc2tool {

using Vector = std::vector<double>;

enum class EmbeddingKind { RemoteEmbedding, LexicalFallback };

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingKind kind() const = 0;
  virtual size_t dimension() const = 0;
  // Returns one vector of exactly dimension() entries per text.
  virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;

  Vector embed_one(const std::string& text) { return embed({text}).front(); }
};

// Hashed character-trigram counts, L2-normalized. Text is lowercased and
// padded with one space on each side; trigrams are hashed with 32-bit FNV-1a
// modulo the dimension. Empty text maps to the zero vector.
class LexicalEmbedding final : public EmbeddingProvider {
 public:
  explicit LexicalEmbedding(size_t dimension = 256);
  EmbeddingKind kind() const override { return EmbeddingKind::LexicalFallback; }
  size_t dimension() const override { return dimension_; }
  std::vector<Vector> embed(const std::vector<std::string>& texts) override;

 private:
  size_t dimension_;
};

// Remote embedding model with an in-memory cache. Throws
// Error(EmbeddingUnavailable) when the service fails or returns vectors of
// the wrong size.
class RemoteEmbedding final : public EmbeddingProvider {
 public:
  RemoteEmbedding(std::shared_ptr<EmbeddingClient> client, size_t dimension);
  EmbeddingKind kind() const override { return EmbeddingKind::RemoteEmbedding; }
  size_t dimension() const override { return dimension_; }
  std::vector<Vector> embed(const std::vector<std::string>& texts) override;

 private:
  std::shared_ptr<EmbeddingClient> client_;
  size_t dimension_;
  std::mutex mu_;
  std::map<std::string, Vector> cache_;
};

// Cosine of the angle between a and b; 0 when either is the zero vector.
// Throws Error(DimensionMismatch).
double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace doc2tool
