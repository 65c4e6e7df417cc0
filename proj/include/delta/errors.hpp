#pragma once

#include <stdexcept>
#include <string>

namespace delta {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (corpus, annotation, alignment, script, checkpoint).
class input_error : public error {
public:
    using error::error;
};

// Caller violated a documented precondition.
class contract_error : public error {
public:
    using error::error;
};

// Bad configuration (unknown strategy, invalid hyperparameters, bad template).
class config_error : public error {
public:
    using error::error;
};

// Source/target length mismatch when assembling a document.
class alignment_error : public error {
public:
    alignment_error(std::size_t source_len, std::size_t target_len);
    std::size_t source_len;
    std::size_t target_len;
};

// Transport-level failure after the retry policy is exhausted.
class transport_error : public error {
public:
    using error::error;
};

// Non-retryable authentication failure (401/403).
class auth_error : public error {
public:
    using error::error;
};

// The backend answered but the body was not a valid chat completion.
class protocol_error : public error {
public:
    using error::error;
};

// Scripted backend misuse: queue exhausted or a strict expectation failed.
class script_error : public error {
public:
    using error::error;
};

// Checkpoint does not match the document or config it is resumed against.
class checkpoint_error : public error {
public:
    using error::error;
};

// The translator produced no usable hypothesis for a sentence.
class translation_error : public error {
public:
    translation_error(const std::string& what, int sentence_index)
        : error(what), sentence_index(sentence_index) {}
    int sentence_index;
};

// A document run aborted partway; carries how far it got.
class run_error : public error {
public:
    run_error(const std::string& what, int last_completed_index,
              std::string checkpoint_path = {})
        : error(what),
          last_completed_index(last_completed_index),
          checkpoint_path(std::move(checkpoint_path)) {}
    int last_completed_index;
    std::string checkpoint_path;  // empty if no checkpoint was written
};

}  // namespace delta
