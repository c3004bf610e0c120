#pragma once

#include <stdexcept>
#include <string>

namespace taphsir {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// corpus
struct EmptySpecificationError : Error {
  using Error::Error;
};
struct DuplicateIdError : Error {
  explicit DuplicateIdError(const std::string& id)
      : Error("duplicate requirement id: " + id), id(id) {}
  std::string id;
};

// nlpcore
struct AnalysisError : Error {
  AnalysisError(const std::string& requirement_id, const std::string& why)
      : Error("analysis failed for requirement " + requirement_id + ": " + why),
        requirement_id(requirement_id) {}
  std::string requirement_id;
};

// fixtures
struct FixtureMissError : Error {
  explicit FixtureMissError(const std::string& text)
      : Error("no golden annotation for text: \"" + text + "\""), text(text) {}
  std::string text;
};

// features
struct EncoderError : Error {
  using Error::Error;
};

// detector
struct InputShapeError : Error {
  using Error::Error;
};
struct NoCandidatesError : Error {
  using Error::Error;
};
struct DegenerateTrainingSetError : Error {
  using Error::Error;
};

// resolver
struct ResolverBackendError : Error {
  using Error::Error;
};

// evalkit
struct InsufficientAnnotationError : Error {
  explicit InsufficientAnnotationError(const std::string& triple_id)
      : Error("triple annotated by fewer than two annotators: " + triple_id),
        triple_id(triple_id) {}
  std::string triple_id;
};
struct AlignmentError : Error {
  using Error::Error;
};

// pipeline / CLI
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// A broken internal invariant. Means a bug, not bad input.
struct InternalConsistencyError : Error {
  using Error::Error;
};

}  // namespace taphsir
