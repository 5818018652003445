#pragma once

#include <stdexcept>
#include <string>

namespace rh {

// Base for all domain failures. `code()` is the stable machine-readable
// name emitted by the CLI error objects.
class DomainError : public std::runtime_error {
public:
  DomainError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define RH_DEFINE_ERROR(Name)                                        \
  class Name : public DomainError {                                  \
  public:                                                            \
    explicit Name(const std::string& what = #Name)                   \
        : DomainError(#Name, what) {}                                \
  }

RH_DEFINE_ERROR(NearZeroOnCircle);
RH_DEFINE_ERROR(GridTooCoarse);
RH_DEFINE_ERROR(WindingNonzero);
RH_DEFINE_ERROR(NonRealInput);
RH_DEFINE_ERROR(InteriorPointExpected);

RH_DEFINE_ERROR(EvaluationAtZeroSet);
RH_DEFINE_ERROR(UnknownFamily);
RH_DEFINE_ERROR(NonPositiveProfile);

RH_DEFINE_ERROR(DegenerateTangency);
RH_DEFINE_ERROR(WindingViolation);
RH_DEFINE_ERROR(NoConvergence);
RH_DEFINE_ERROR(RankCollapse);
RH_DEFINE_ERROR(ChartNotNormalized);

RH_DEFINE_ERROR(StepUnderflow);

RH_DEFINE_ERROR(AnalyticSelector);
RH_DEFINE_ERROR(DivisibilityDefect);
RH_DEFINE_ERROR(MChangedAcrossGrid);

RH_DEFINE_ERROR(RayMissesLevel);
RH_DEFINE_ERROR(NonConvexFiber);

RH_DEFINE_ERROR(ConfigError);

#undef RH_DEFINE_ERROR

}  // namespace rh
