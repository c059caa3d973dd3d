import sys

from ramac.xp_cli.main import main

sys.exit(main())
