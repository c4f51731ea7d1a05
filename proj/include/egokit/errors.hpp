#pragma once

#include <stdexcept>
#include <string>

namespace egokit {

// Base class for all egokit failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// signal
class MissingColumn : public Error { public: using Error::Error; };
class NonMonotonicTime : public Error { public: using Error::Error; };
class NonUniformTime : public Error { public: using Error::Error; };
class RaggedRow : public Error { public: using Error::Error; };
class UnknownChannel : public Error { public: using Error::Error; };
class EmptyChannelSet : public Error { public: using Error::Error; };
class SeriesTooShort : public Error { public: using Error::Error; };

// gng / vocabulary
class TooFewSamples : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class SequenceTooShort : public Error { public: using Error::Error; };
class UnknownWord : public Error { public: using Error::Error; };

// anomaly / mjpf
class NotPositiveDefinite : public Error { public: using Error::Error; };
class CoefficientOutOfRange : public Error { public: using Error::Error; };
class NumericalFailure : public Error { public: using Error::Error; };

// eval
class SingleClassLabels : public Error { public: using Error::Error; };
class LengthMismatch : public Error { public: using Error::Error; };
class EmptyReportSet : public Error { public: using Error::Error; };

// scenario / config
class InvalidParams : public Error { public: using Error::Error; };

// filesystem
class IoError : public Error { public: using Error::Error; };

}  // namespace egokit
