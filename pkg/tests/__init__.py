# -*- coding: utf-8 -*-
"""
Nano-PAPF 测试套件
"""
