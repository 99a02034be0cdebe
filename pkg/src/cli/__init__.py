"""
Command Line Interface for superops.
"""

# Import the submodule without rebinding ``cli.main`` to the function, so that
# ``cli.main`` stays the module (needed for ``patch("cli.main.<name>")``).
from cli.main import create_cli_app

__all__ = ["create_cli_app"]
