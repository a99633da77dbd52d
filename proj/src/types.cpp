#include "edgeagent/types.hpp"

namespace edgeagent {

const char* source_name(TriggerSource s) {
  switch (s) {
    case TriggerSource::ui: return "ui";
    case TriggerSource::floating_widget: return "floating_widget";
    case TriggerSource::microphone: return "microphone";
    case TriggerSource::schedule: return "schedule";
    case TriggerSource::external_gateway: return "external_gateway";
  }
  return "ui";
}

}  // namespace edgeagent
