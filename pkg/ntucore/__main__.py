# -*- coding: utf-8 -*-

from ntucore.cli import main

if __name__ == '__main__':
    main()
