"""Edge agent runtime over a simulated handset."""

import json

from ._edgeagent import Error
from ._edgeagent import Runtime as _Runtime
from ._edgeagent import parse_dump as _parse_dump

__all__ = ["Error", "Runtime", "parse_dump", "run_scenario"]


class Runtime:
    """A scenario's device plus every service around it.

    State persists under ``root``; a private temporary directory is used
    when it is omitted.
    """

    def __init__(self, scenario, root=None):
        self._rt = _Runtime(str(scenario), None if root is None else str(root))

    @property
    def root(self):
        return self._rt.root

    @property
    def model_enabled(self):
        return self._rt.model_enabled

    def run_script(self):
        return json.loads(self._rt.run_script())

    def query(self, text, session="default", source="ui"):
        return json.loads(self._rt.query(text, session, source))

    def observation(self):
        return json.loads(self._rt.observation())

    def gesture(self, gesture):
        return self._rt.gesture(json.dumps(gesture))

    def record_start(self, session="default"):
        self._rt.record_start(session)

    def record_stop(self, session="default", name=None):
        return json.loads(self._rt.record_stop(session, name))

    def replay(self, bookmark):
        return json.loads(self._rt.replay(bookmark))

    def memory(self):
        return json.loads(self._rt.memory())

    def state_digest(self):
        return self._rt.state_digest()


def parse_dump(text):
    return json.loads(_parse_dump(text))


def run_scenario(path, root=None):
    return Runtime(path, root).run_script()
