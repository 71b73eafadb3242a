"""Model-agnostic computer-use agent runtime.

Subpackages:

- ``transcript``: tagged function-call transcript codec and schema validation
- ``screen``: display geometry and model/physical coordinate scaling
- ``actions``: the GUI action vocabulary and its text syntax
- ``backends``: input backends (simulated desktop, live OS)
- ``tools``: the computer, editor, and bash tool executors
- ``agent``: prompt composition, visual history, episode loop, adapters
- ``service``: session control plane with human approval and annotations
- ``cli``: operator command line
"""

__version__ = "0.1.0"
