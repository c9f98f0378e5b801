import sys

from app import App

sys.exit(App(sys.argv[1:]).main())
