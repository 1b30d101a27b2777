from __future__ import annotations

import sys

from hodgeideals.cli import main

sys.exit(main())
