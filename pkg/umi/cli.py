"""Entry point for the ``umi`` console script.

``umi simulate ...`` is the same as ``python manage.py simulate ...``.
"""

import os
import sys


def main() -> None:
    """Dispatch ``umi <verb>`` to the matching management command."""
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "umi.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError("Couldn't import Django. Is it installed and available on your PYTHONPATH?") from exc
    execute_from_command_line(["umi", *sys.argv[1:]])


if __name__ == "__main__":
    main()
