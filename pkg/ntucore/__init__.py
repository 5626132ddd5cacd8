# -*- coding: utf-8 -*-

from ntucore.base import NTUCORE_VERSION  # noqa: F401
