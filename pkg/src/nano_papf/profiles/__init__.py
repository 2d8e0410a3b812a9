# -*- coding: utf-8 -*-
"""随包发布的参数配置（JSON）"""
