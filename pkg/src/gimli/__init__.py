"""gimli: mine repositories, label issues by the API domains of their fixes,
and recommend open issues matching a contributor's skills."""

__version__ = "0.1.0"
